use std::collections::HashSet;
use std::env;
use std::fs::{self, OpenOptions};
use std::io::{Read, Write};
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use super::{io_err, HarnessError, RunResult, SolverSpec, Verdict};

const POLL: Duration = Duration::from_millis(10);

/// One exported script, tagged with its problem id and conjecture variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: String,
    pub variant: String,
    pub file: PathBuf,
}

fn resolve(program: &str) -> Option<PathBuf> {
    let p = Path::new(program);
    if program.contains('/') {
        return p.is_file().then(|| p.to_path_buf());
    }
    env::split_paths(&env::var_os("PATH")?)
        .map(|d| d.join(program))
        .find(|c| c.is_file())
}

fn kill_group(pid: u32) {
    // the child leads its own group, so this also reaches anything it forked
    unsafe {
        libc::killpg(pid as libc::pid_t, libc::SIGKILL);
    }
}

fn wait_until(child: &mut std::process::Child, deadline: Instant) -> Option<ExitStatus> {
    loop {
        match child.try_wait() {
            Ok(Some(status)) => return Some(status),
            Ok(None) if Instant::now() < deadline => thread::sleep(POLL),
            _ => return None,
        }
    }
}

fn execute(spec: &SolverSpec, file: &Path) -> (Verdict, f64) {
    let argv = spec.argv(file);
    let start = Instant::now();
    let spawned = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .process_group(0)
        .spawn();
    let mut child = match spawned {
        Ok(c) => c,
        Err(e) => {
            log::warn!("{}: spawn failed: {e}", spec.name);
            return (Verdict::Error, start.elapsed().as_secs_f64());
        }
    };
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    });
    let status = wait_until(&mut child, start + spec.timeout());
    kill_group(child.id());
    let _ = child.wait();
    let wall = start.elapsed().as_secs_f64();
    let text = reader.join().unwrap_or_default();
    let verdict = match status {
        None => Verdict::Timeout,
        Some(st) => match spec.verdict_from_stdout(&text) {
            Some(v) => v,
            None if st.success() => Verdict::Unknown,
            None => Verdict::Error,
        },
    };
    (verdict, wall)
}

/// Reads a results log, skipping lines that do not parse (such as a line cut
/// short by an interrupted run).
pub fn read_log(path: &Path) -> Result<Vec<RunResult>, HarnessError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .filter_map(|(i, l)| match serde_json::from_str(l) {
            Ok(r) => Some(r),
            Err(e) => {
                log::warn!(
                    "{}:{}: skipping unreadable result: {e}",
                    path.display(),
                    i + 1
                );
                None
            }
        })
        .collect())
}

/// Runs every solver on every job not already present in `log`, `width`
/// processes at a time, appending each result to `log` as it completes.
/// Returns the log's results together with the new ones, sorted by key.
pub fn run(
    solvers: &[SolverSpec],
    jobs: &[Job],
    width: usize,
    log: &Path,
) -> Result<Vec<RunResult>, HarnessError> {
    for s in solvers {
        s.validate()?;
        let program = s.argv(Path::new(""))[0].clone();
        if resolve(&program).is_none() {
            return Err(HarnessError::MissingBinary {
                solver: s.name.clone(),
                program,
            });
        }
    }

    let mut results = read_log(log)?;
    let mut done: HashSet<_> = results.iter().map(RunResult::key).collect();
    let mut pending = Vec::new();
    for s in solvers {
        for j in jobs {
            if done.insert((j.id.clone(), s.name.clone(), j.variant.clone())) {
                pending.push((s, j));
            }
        }
    }
    log::info!(
        "{} runs pending, {} already logged",
        pending.len(),
        results.len()
    );

    if let Some(dir) = log.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let needs_newline = fs::read(log).is_ok_and(|b| b.last().is_some_and(|&c| c != b'\n'));
    let mut out = OpenOptions::new()
        .create(true)
        .append(true)
        .open(log)
        .map_err(io_err(log))?;
    if needs_newline {
        out.write_all(b"\n").map_err(io_err(log))?;
    }

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<RunResult>();
    thread::scope(|scope| -> Result<(), HarnessError> {
        for _ in 0..width.max(1).min(pending.len()) {
            let tx = tx.clone();
            let (next, pending) = (&next, &pending);
            scope.spawn(move || {
                while let Some(&(spec, job)) = pending.get(next.fetch_add(1, Ordering::Relaxed)) {
                    let (verdict, wall_secs) = execute(spec, &job.file);
                    let r = RunResult {
                        id: job.id.clone(),
                        solver: spec.name.clone(),
                        variant: job.variant.clone(),
                        verdict,
                        wall_secs,
                    };
                    if tx.send(r).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);
        for r in rx {
            let line = serde_json::to_string(&r).expect("results serialize");
            writeln!(out, "{line}")
                .and_then(|_| out.flush())
                .map_err(io_err(log))?;
            results.push(r);
        }
        Ok(())
    })?;

    results.sort_by_key(RunResult::key);
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::os::unix::fs::PermissionsExt;

    fn stub(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, format!("#!/bin/sh\n{body}\n")).unwrap();
        fs::set_permissions(&p, fs::Permissions::from_mode(0o755)).unwrap();
        p
    }

    fn spec(name: &str, prog: &Path, secs: u64) -> SolverSpec {
        SolverSpec::new(name, format!("{} {{file}}", prog.display()))
            .unwrap()
            .with_timeout(secs)
    }

    #[test]
    fn verdicts_from_stubs() {
        let d = tempfile::tempdir().unwrap();
        let cases = [
            ("echo unsat", Verdict::Proved),
            ("echo banner; echo sat", Verdict::CounterSat),
            ("echo unknown", Verdict::Unknown),
            ("exit 0", Verdict::Unknown),
            ("echo oops; exit 3", Verdict::Error),
            ("kill -SEGV $$", Verdict::Error),
        ];
        for (i, (body, want)) in cases.into_iter().enumerate() {
            let p = stub(d.path(), &format!("s{i}"), body);
            let (v, _) = execute(&spec("s", &p, 5), Path::new("x.smt2"));
            assert_eq!(v, want, "{body}");
        }
    }

    #[test]
    fn timeout_kills_the_process_group() {
        let d = tempfile::tempdir().unwrap();
        let p = stub(d.path(), "slow", "sleep 30 & wait; echo unsat");
        let start = Instant::now();
        let (v, wall) = execute(&spec("slow", &p, 1), Path::new("x"));
        assert_eq!(v, Verdict::Timeout);
        assert!(wall < 5.0 && start.elapsed() < Duration::from_secs(5));
    }

    #[test]
    fn file_argument_is_passed() {
        let d = tempfile::tempdir().unwrap();
        let p = stub(d.path(), "cat", "cat \"$1\"");
        let f = d.path().join("in.smt2");
        fs::write(&f, "unsat\n").unwrap();
        assert_eq!(execute(&spec("c", &p, 5), &f).0, Verdict::Proved);
    }

    #[test]
    fn missing_binary_is_fatal() {
        let d = tempfile::tempdir().unwrap();
        let s = SolverSpec::new("ghost", "definitely-not-a-solver-binary {file}").unwrap();
        let err = run(&[s], &[], 1, &d.path().join("log")).unwrap_err();
        assert!(matches!(err, HarnessError::MissingBinary { .. }));
    }

    #[test]
    fn resumes_from_log() {
        let d = tempfile::tempdir().unwrap();
        let count = d.path().join("count");
        let p = stub(
            d.path(),
            "s",
            &format!("echo x >> {}; echo unsat", count.display()),
        );
        let jobs: Vec<Job> = (0..4)
            .map(|i| Job {
                id: format!("A{i}"),
                variant: "base".into(),
                file: d.path().join(format!("A{i}.smt2")),
            })
            .collect();
        let log = d.path().join("results.jsonl");
        let first = run(&[spec("s", &p, 5)], &jobs[..2], 2, &log).unwrap();
        assert_eq!(first.len(), 2);
        // simulate an interrupted write
        let mut f = OpenOptions::new().append(true).open(&log).unwrap();
        f.write_all(b"{\"id\":\"A2\",\"sol").unwrap();
        let all = run(&[spec("s", &p, 5)], &jobs, 3, &log).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|r| r.verdict == Verdict::Proved));
        assert_eq!(fs::read_to_string(&count).unwrap().lines().count(), 4);
        assert_eq!(read_log(&log).unwrap().len(), 4);
        let again = run(&[spec("s", &p, 5)], &jobs, 3, &log).unwrap();
        assert_eq!(again, all);
        assert_eq!(fs::read_to_string(&count).unwrap().lines().count(), 4);
    }
}
