//! Solving a directory of problem files with per-file timing.

use std::fmt::{self, Write as _};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::enumerate::SearchError;
use crate::solver::{solve_text, Budgets, SolveError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Solved,
    /// A size, candidate or time budget ran out.
    Budget,
    /// The pruned language was exhausted or the result fell outside the grammar.
    Unsolvable,
    /// The file is not an accepted PBE problem.
    Error,
    Unreadable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Budget => "budget",
            Status::Unsolvable => "unsolvable",
            Status::Error => "error",
            Status::Unreadable => "unreadable",
        }
    }

    /// Process exit code for a single-file solve.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Solved => 0,
            Status::Budget | Status::Unsolvable => 1,
            Status::Error | Status::Unreadable => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct FileResult {
    pub file: String,
    pub status: Status,
    pub millis: f64,
    pub solution_size: Option<usize>,
    pub internal_nodes: Option<usize>,
    pub candidates: Option<u64>,
    /// The printed solution on success.
    pub solution: Option<String>,
    /// Diagnostic on failure.
    pub message: Option<String>,
}

fn classify(err: &SolveError) -> Status {
    match err {
        SolveError::Frontend(_) => Status::Error,
        e if e.is_budget() => Status::Budget,
        SolveError::Unify(u) if u.search_cause() == Some(SearchError::Exhausted) => {
            Status::Unsolvable
        }
        _ => Status::Unsolvable,
    }
}

/// Reads and solves one file.
pub fn run_file(path: &Path, budgets: &Budgets) -> FileResult {
    let file = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let started = Instant::now();
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            return FileResult {
                file,
                status: Status::Unreadable,
                millis: 0.0,
                solution_size: None,
                internal_nodes: None,
                candidates: None,
                solution: None,
                message: Some(e.to_string()),
            }
        }
    };
    let result = solve_text(&text, budgets);
    let millis = started.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok((_, out)) => FileResult {
            file,
            status: Status::Solved,
            millis,
            solution_size: Some(out.stats.solution_size),
            internal_nodes: Some(out.stats.internal_nodes),
            candidates: Some(out.stats.candidates),
            solution: Some(out.text),
            message: None,
        },
        Err(e) => FileResult {
            file,
            status: classify(&e),
            millis,
            solution_size: None,
            internal_nodes: None,
            candidates: None,
            solution: None,
            message: Some(e.to_string()),
        },
    }
}

/// Per-file results in file-name order.
#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<FileResult>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl BenchReport {
    pub fn solved(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == Status::Solved)
            .count()
    }

    fn solved_times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.status == Status::Solved)
            .map(|r| r.millis)
            .collect();
        t.sort_by(f64::total_cmp);
        t
    }

    /// Mean wall time of solved files, in milliseconds.
    pub fn mean_millis(&self) -> Option<f64> {
        let t = self.solved_times();
        (!t.is_empty()).then(|| t.iter().sum::<f64>() / t.len() as f64)
    }

    /// Median wall time of solved files, in milliseconds.
    pub fn median_millis(&self) -> Option<f64> {
        let t = self.solved_times();
        match t.len() {
            0 => None,
            n if n % 2 == 1 => Some(t[n / 2]),
            n => Some((t[n / 2 - 1] + t[n / 2]) / 2.0),
        }
    }

    /// Columns: file, status, millis, solution_size, internal_nodes, candidates.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "file",
            "status",
            "millis",
            "solution_size",
            "internal_nodes",
            "candidates",
        ])
        .expect("writing to memory");
        for r in &self.rows {
            w.write_record([
                r.file.clone(),
                r.status.to_string(),
                format!("{:.3}", r.millis),
                opt(r.solution_size),
                opt(r.internal_nodes),
                opt(r.candidates),
            ])
            .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are UTF-8")
    }

    pub fn to_table(&self) -> String {
        let name_w = self
            .rows
            .iter()
            .map(|r| r.file.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<name_w$}  {:<10}  {:>10}  {:>5}  {:>5}  {:>12}",
            "file", "status", "millis", "size", "nodes", "candidates"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<name_w$}  {:<10}  {:>10.1}  {:>5}  {:>5}  {:>12}",
                r.file,
                r.status.as_str(),
                r.millis,
                opt(r.solution_size),
                opt(r.internal_nodes),
                opt(r.candidates)
            );
        }
        let fmt_ms = |v: Option<f64>| {
            v.map(|v| format!("{v:.1} ms"))
                .unwrap_or_else(|| "-".into())
        };
        let _ = writeln!(
            out,
            "solved {}/{}  mean {}  median {}",
            self.solved(),
            self.rows.len(),
            fmt_ms(self.mean_millis()),
            fmt_ms(self.median_millis())
        );
        out
    }
}

/// Problem files (`*.sl`) directly inside `dir`, sorted by name.
pub fn problem_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "sl") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Solves every problem file in `dir` using up to `jobs` worker threads.
pub fn bench_dir(dir: &Path, budgets: &Budgets, jobs: usize) -> io::Result<BenchReport> {
    let files = problem_files(dir)?;
    let slots: Vec<Mutex<Option<FileResult>>> = files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, files.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let row = run_file(path, budgets);
                *slots[i].lock().expect("no poisoned slots") = Some(row);
            });
        }
    });
    Ok(BenchReport {
        rows: slots
            .into_iter()
            .map(|s| {
                s.into_inner()
                    .expect("no poisoned slots")
                    .expect("every file ran")
            })
            .collect(),
    })
}
