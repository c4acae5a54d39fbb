//! Running an installed NuSMV binary and reading its verdicts back.

use std::ffi::OsStr;
use std::io::{Read, Write as _};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::checker::{Lasso, Verdict};
use crate::ltl::parse_ltl;
use crate::semantics::Valuation;

/// Environment variable naming the binary.
pub const PATH_VAR: &str = "NUSMV_PATH";

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

const BANNER_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolInfo {
    pub path: PathBuf,
    /// First banner line mentioning the tool, or empty.
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detection {
    Found(ToolInfo),
    Absent { note: String },
}

#[derive(Debug, Error)]
pub enum NusmvError {
    #[error("tool not found: {0}")]
    NotFound(String),
    #[error("i/o error running {0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("no result after {} s", .0.as_secs())]
    Timeout(Duration),
    #[error("exited with {status}:\n{stderr}")]
    Failed { status: String, stderr: String },
    #[error("unrecognized output at line {line}: {text}")]
    Unrecognized { line: usize, text: String },
}

fn executable(path: &Path) -> bool {
    path.is_file()
}

fn search_path() -> Option<PathBuf> {
    let dirs = std::env::var_os("PATH")?;
    std::env::split_paths(&dirs)
        .flat_map(|d| ["NuSMV", "nusmv"].map(|n| d.join(n)))
        .find(|p| executable(p))
}

fn banner(path: &Path) -> String {
    let Ok(out) = run(path, &[OsStr::new("-h")], BANNER_TIMEOUT) else {
        return String::new();
    };
    (out.stderr + &out.stdout)
        .lines()
        .find(|l| l.contains("NuSMV"))
        .map(|l| l.trim_start_matches('*').trim().to_string())
        .unwrap_or_default()
}

struct Output {
    status: ExitStatus,
    stdout: String,
    stderr: String,
}

/// Runs to completion or kills the process once `timeout` has passed.
fn run(path: &Path, args: &[&OsStr], timeout: Duration) -> Result<Output, NusmvError> {
    let io = |e| NusmvError::Io(path.to_path_buf(), e);
    let mut child = Command::new(path)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(io)?;
    let drain = |mut r: Box<dyn Read + Send>| {
        std::thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = r.read_to_end(&mut buf);
            String::from_utf8_lossy(&buf).into_owned()
        })
    };
    let stdout = drain(Box::new(child.stdout.take().expect("piped stdout")));
    let stderr = drain(Box::new(child.stderr.take().expect("piped stderr")));

    let start = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait().map_err(io)? {
            break status;
        }
        if start.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(NusmvError::Timeout(timeout));
        }
        std::thread::sleep(Duration::from_millis(10));
    };
    Ok(Output {
        status,
        stdout: stdout.join().unwrap_or_default(),
        stderr: stderr.join().unwrap_or_default(),
    })
}

/// Locates the binary: `path_override`, then `NUSMV_PATH`, then `PATH`.
pub fn detect(path_override: Option<&Path>) -> Detection {
    let (candidate, source) = if let Some(p) = path_override {
        (Some(p.to_path_buf()), "override")
    } else if let Some(p) = std::env::var_os(PATH_VAR) {
        (Some(PathBuf::from(p)), PATH_VAR)
    } else {
        (search_path(), "PATH")
    };
    match candidate {
        Some(path) if executable(&path) => Detection::Found(ToolInfo {
            version: banner(&path),
            path,
        }),
        Some(path) => Detection::Absent {
            note: format!("{} (from {source}) does not exist", path.display()),
        },
        None => Detection::Absent {
            note: format!("no NuSMV on PATH and {PATH_VAR} is unset"),
        },
    }
}

/// Writes `smv_text` to a temporary file, runs the tool on it and returns
/// its standard output.
pub fn run_check(tool: &ToolInfo, smv_text: &str, timeout: Duration) -> Result<String, NusmvError> {
    let io = |e| NusmvError::Io(tool.path.clone(), e);
    let mut file = tempfile::Builder::new()
        .prefix("containment-")
        .suffix(".smv")
        .tempfile()
        .map_err(io)?;
    file.write_all(smv_text.as_bytes()).map_err(io)?;
    file.flush().map_err(io)?;

    let out = run(&tool.path, &[file.path().as_os_str()], timeout)?;
    if !out.status.success() {
        return Err(NusmvError::Failed {
            status: out.status.to_string(),
            stderr: out.stderr,
        });
    }
    Ok(out.stdout)
}

struct Trace {
    states: Vec<Valuation>,
    loop_start: Option<usize>,
}

fn close(verdict: &mut Verdict<Valuation>, trace: Option<Trace>, line: usize) -> Result<(), NusmvError> {
    let Some(mut t) = trace else {
        return Ok(());
    };
    let unrecognized = |text: &str| NusmvError::Unrecognized {
        line,
        text: text.to_string(),
    };
    let l = t
        .loop_start
        .ok_or_else(|| unrecognized("counterexample without '-- Loop starts here'"))?;
    if l >= t.states.len() {
        return Err(unrecognized("loop marker after the last state"));
    }
    // The tool repeats the loop's first state at the end.
    if t.states.len() > l + 1 && t.states.last() == Some(&t.states[l]) {
        t.states.pop();
    }
    let cycle = t.states.split_off(l);
    verdict.counterexample = Some(Lasso {
        prefix: t.states,
        cycle,
    });
    Ok(())
}

/// One verdict per `-- specification ... is true|false` line. States of a
/// counterexample carry forward every variable not printed in them.
pub fn parse_output(raw: &str) -> Result<Vec<Verdict<Valuation>>, NusmvError> {
    let mut verdicts: Vec<Verdict<Valuation>> = Vec::new();
    let mut trace: Option<Trace> = None;
    let mut in_input = false;
    let mut last_line = 0;
    for (n, line) in raw.lines().enumerate() {
        let no = n + 1;
        last_line = no;
        let t = line.trim();
        let unrecognized = || NusmvError::Unrecognized {
            line: no,
            text: line.to_string(),
        };
        if let Some(rest) = t.strip_prefix("-- specification ") {
            if let Some(v) = verdicts.last_mut() {
                close(v, trace.take(), no)?;
            }
            let (formula, holds) = if let Some(f) = rest.strip_suffix(" is true") {
                (f, true)
            } else if let Some(f) = rest.strip_suffix(" is false") {
                (f, false)
            } else {
                return Err(unrecognized());
            };
            let property = parse_ltl(formula.trim()).map_err(|_| unrecognized())?;
            verdicts.push(Verdict {
                property,
                holds,
                counterexample: None,
            });
            continue;
        }
        if t.is_empty()
            || t.starts_with("***")
            || t.starts_with('$')
            || t == "..."
            || t.starts_with("-- as demonstrated")
            || t.starts_with("Trace Description:")
            || t.starts_with("Trace Type:")
        {
            continue;
        }
        let current = verdicts.last().filter(|v| !v.holds);
        if current.is_none() {
            return Err(unrecognized());
        }
        if t == "-- Loop starts here" {
            let tr = trace.get_or_insert(Trace {
                states: Vec::new(),
                loop_start: None,
            });
            tr.loop_start = Some(tr.states.len());
            continue;
        }
        if t.starts_with("-> State:") && t.ends_with("<-") {
            let tr = trace.get_or_insert(Trace {
                states: Vec::new(),
                loop_start: None,
            });
            let next = tr.states.last().cloned().unwrap_or_default();
            tr.states.push(next);
            in_input = false;
            continue;
        }
        if t.starts_with("-> Input:") && t.ends_with("<-") {
            in_input = true;
            continue;
        }
        if let Some((name, value)) = t.split_once(" = ") {
            if in_input {
                continue;
            }
            let state = trace
                .as_mut()
                .and_then(|tr| tr.states.last_mut())
                .ok_or_else(unrecognized)?;
            state.insert(name.trim().to_string(), value.trim().to_string());
            continue;
        }
        return Err(unrecognized());
    }
    if let Some(v) = verdicts.last_mut() {
        close(v, trace.take(), last_line)?;
    }
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
*** This is NuSMV 2.6.0 (compiled on Thu Oct 24 17:43:39 2019)
-- specification  G (p ->  F q)  is true
-- specification  G (p -> ( F q xor  F r))  is false
-- as demonstrated by the following execution sequence
Trace Description: LTL Counterexample
Trace Type: Counterexample
-> State: 1.1 <-
  p = TRUE
  q = FALSE
  r = FALSE
-> State: 1.2 <-
  p = FALSE
-- Loop starts here
-> State: 1.3 <-
  q = TRUE
-> State: 1.4 <-
  q = FALSE
-> State: 1.5 <-
  q = TRUE
";

    #[test]
    fn reads_verdicts_and_lasso() {
        let v = parse_output(SAMPLE).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v[0].holds && v[0].counterexample.is_none());
        assert_eq!(v[1].property.to_string(), "G (p -> F q xor F r)");
        let l = v[1].counterexample.as_ref().unwrap();
        assert_eq!(l.prefix.len(), 2);
        assert_eq!(l.cycle.len(), 2);
        assert_eq!(l.prefix[1]["p"], "FALSE");
        assert_eq!(l.prefix[1]["r"], "FALSE");
        assert_eq!(l.cycle[0]["q"], "TRUE");
        assert_eq!(l.cycle[1]["q"], "FALSE");
    }

    #[test]
    fn rejects_unknown_layout() {
        let err = parse_output("-- specification G p is maybe\n").unwrap_err();
        assert!(matches!(err, NusmvError::Unrecognized { line: 1, .. }));
        let err = parse_output("-- specification G p is true\nsomething odd\n").unwrap_err();
        assert!(matches!(err, NusmvError::Unrecognized { line: 2, .. }));
        let err = parse_output("-- specification G p is false\n-> State: 1.1 <-\n  p = FALSE\n").unwrap_err();
        assert!(matches!(err, NusmvError::Unrecognized { .. }));
    }

    #[test]
    fn override_to_missing_file_is_absent() {
        match detect(Some(Path::new("/nonexistent/NuSMV"))) {
            Detection::Absent { note } => assert!(note.contains("does not exist")),
            other => panic!("{other:?}"),
        }
    }
}
