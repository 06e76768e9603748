use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{EvalStats, TrainSize};
use crate::error::{Error, Result};
use crate::Game;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// One evaluation: CSV header `game,size,run,split,mean,std,success_pct,episodes`.
/// `std` here is across episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub game: Game,
    pub size: TrainSize,
    pub run: u32,
    pub split: Split,
    pub mean: f64,
    pub std: f64,
    pub success_pct: f64,
    pub episodes: usize,
}

impl RunResult {
    pub fn new(game: Game, size: TrainSize, run: u32, split: Split, stats: &EvalStats) -> Self {
        RunResult {
            game,
            size,
            run,
            split,
            mean: stats.mean_return,
            std: stats.std_return,
            success_pct: stats.success_rate_percent,
            episodes: stats.episodes,
        }
    }

    /// The number a results table shows: mean return for Platforms, success
    /// percentage otherwise.
    pub fn headline(&self) -> f64 {
        match self.game {
            Game::Platforms => self.mean,
            _ => self.success_pct,
        }
    }
}

fn report_err(e: impl std::fmt::Display) -> Error {
    Error::Report(e.to_string())
}

pub fn write_runs_csv<W: Write>(out: W, rows: &[RunResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(report_err)?;
    }
    w.flush().map_err(report_err)
}

pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunResult>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(report_err)
}

pub fn write_runs_json<W: Write>(out: W, rows: &[RunResult]) -> Result<()> {
    serde_json::to_writer_pretty(out, rows).map_err(report_err)
}

pub fn read_runs_json<R: Read>(input: R) -> Result<Vec<RunResult>> {
    serde_json::from_reader(input).map_err(report_err)
}

/// One table row; means and stds are across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub size: TrainSize,
    pub train_mean: f64,
    pub train_std: f64,
    pub test_mean: f64,
    pub test_std: f64,
    /// Test success rate, averaged over runs.
    pub success_rate_percent: f64,
    /// Test episodes summed over runs.
    pub episodes: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub game: Game,
    pub agent: String,
    /// `success_pct` or `mean_return`.
    pub metric: String,
    pub rows: Vec<GapRow>,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(report_err)
    }
}

/// Mean and population std.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregates run rows into one row per train size. Privileged agents read
/// level internals, so their numbers say nothing about generalization.
pub fn gap_report(agent: &str, privileged: bool, runs: &[RunResult]) -> Result<EvalReport> {
    if privileged {
        return Err(Error::PrivilegedAgent(agent.to_owned()));
    }
    let game = runs.first().ok_or_else(|| Error::Report("no run results".into()))?.game;
    if let Some(r) = runs.iter().find(|r| r.game != game) {
        return Err(Error::Report(format!("mixed games {game} and {}", r.game)));
    }
    let mut by_size: BTreeMap<TrainSize, (Vec<&RunResult>, Vec<&RunResult>)> = BTreeMap::new();
    for r in runs {
        let slot = by_size.entry(r.size).or_default();
        match r.split {
            Split::Train => slot.0.push(r),
            Split::Test => slot.1.push(r),
        }
    }
    let mut rows = Vec::with_capacity(by_size.len());
    for (size, (train, test)) in by_size {
        if train.is_empty() || test.is_empty() {
            return Err(Error::Report(format!("size {size} lacks a train or test result")));
        }
        let (train_mean, train_std) = mean_std(&train.iter().map(|r| r.headline()).collect::<Vec<_>>());
        let (test_mean, test_std) = mean_std(&test.iter().map(|r| r.headline()).collect::<Vec<_>>());
        let (success, _) = mean_std(&test.iter().map(|r| r.success_pct).collect::<Vec<_>>());
        rows.push(GapRow {
            size,
            train_mean,
            train_std,
            test_mean,
            test_std,
            success_rate_percent: success,
            episodes: test.iter().map(|r| r.episodes).sum(),
            gap: train_mean - test_mean,
        });
    }
    Ok(EvalReport {
        game,
        agent: agent.to_owned(),
        metric: if game == Game::Platforms { "mean_return" } else { "success_pct" }.to_owned(),
        rows,
    })
}

/// Two decimals with trailing zeros dropped, keeping at least one.
pub fn format_value(x: f64) -> String {
    let s = format!("{x:.2}");
    let s = s.strip_suffix('0').unwrap_or(&s);
    let s = if s.ends_with(".0") { s } else { s.strip_suffix('0').unwrap_or(s) };
    if s == "-0.0" {
        "0.0".to_owned()
    } else {
        s.to_owned()
    }
}

pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{} ± {}", format_value(mean), format_value(std))
}

/// Plain-text results table: levels, train, test, gap.
pub fn format_table(report: &EvalReport) -> String {
    let cells: Vec<[String; 4]> = report
        .rows
        .iter()
        .map(|r| {
            [
                r.size.label(),
                format_cell(r.train_mean, r.train_std),
                format_cell(r.test_mean, r.test_std),
                format_value(r.gap),
            ]
        })
        .collect();
    let header = ["# Levels", "Train", "Test", "Gap"];
    let mut widths = header.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cols: &[&str]| {
        let padded: Vec<String> = cols
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&header);
    for row in &cells {
        line(&row.each_ref().map(String::as_str));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(size: TrainSize, run: u32, split: Split, success: f64) -> RunResult {
        RunResult {
            game: Game::CoinRun,
            size,
            run,
            split,
            mean: success / 10.0,
            std: 4.5,
            success_pct: success,
            episodes: 100,
        }
    }

    #[test]
    fn csv_header_is_exact() {
        let mut buf = Vec::new();
        write_runs_csv(&mut buf, &[run(TrainSize::Finite(100), 0, Split::Train, 50.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "game,size,run,split,mean,std,success_pct,episodes");
        assert_eq!(text.lines().nth(1).unwrap(), "coinrun,100,0,train,5.0,4.5,50.0,100");
    }

    #[test]
    fn csv_and_json_round_trip() {
        let rows = vec![
            run(TrainSize::Finite(100), 0, Split::Train, 1.0 / 3.0),
            run(TrainSize::Unbounded, 4, Split::Test, 99.123_456_789_012_34),
        ];
        let mut csv_buf = Vec::new();
        write_runs_csv(&mut csv_buf, &rows).unwrap();
        let from_csv = read_runs_csv(csv_buf.as_slice()).unwrap();
        let mut json_buf = Vec::new();
        write_runs_json(&mut json_buf, &from_csv).unwrap();
        assert_eq!(read_runs_json(json_buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn std_is_across_runs() {
        let size = TrainSize::Finite(100);
        let rows = [
            run(size, 0, Split::Train, 90.0),
            run(size, 1, Split::Train, 100.0),
            run(size, 0, Split::Test, 60.0),
            run(size, 1, Split::Test, 70.0),
        ];
        let report = gap_report("random", false, &rows).unwrap();
        let r = report.rows[0];
        assert_eq!((r.train_mean, r.train_std), (95.0, 5.0));
        assert_eq!((r.test_mean, r.test_std), (65.0, 5.0));
        assert_eq!(r.gap, 30.0);
        assert_eq!(r.episodes, 200);
        assert_eq!(report.metric, "success_pct");
    }

    #[test]
    fn identical_splits_have_zero_gap() {
        let size = TrainSize::Unbounded;
        let rows = [run(size, 0, Split::Train, 37.1), run(size, 0, Split::Test, 37.1)];
        assert_eq!(gap_report("random", false, &rows).unwrap().rows[0].gap, 0.0);
    }

    #[test]
    fn privileged_and_incomplete_inputs_are_refused() {
        let rows = [run(TrainSize::Finite(100), 0, Split::Train, 1.0)];
        assert!(matches!(gap_report("bfs-oracle", true, &rows), Err(Error::PrivilegedAgent(_))));
        assert!(matches!(gap_report("random", false, &rows), Err(Error::Report(_))));
        assert!(gap_report("random", false, &[]).is_err());
    }

    #[test]
    fn values_format_with_trimmed_decimals() {
        assert_eq!(format_value(99.45), "99.45");
        assert_eq!(format_value(95.70), "95.7");
        assert_eq!(format_value(1.0), "1.0");
        assert_eq!(format_value(0.2), "0.2");
        assert_eq!(format_value(-0.001), "0.0");
        assert_eq!(format_cell(99.45, 0.09), "99.45 ± 0.09");
    }

    // Published CoinRun results, Nature-CNN columns.
    const TABLE_ONE: [(&str, &str, &str); 9] = [
        ("100", "99.45 ± 0.09", "66.79 ± 1.09"),
        ("500", "97.85 ± 0.46", "70.54 ± 0.62"),
        ("1000", "95.7 ± 0.65", "72.51 ± 0.68"),
        ("2000", "92.65 ± 0.71", "75.6 ± 0.28"),
        ("4000", "90.18 ± 1.04", "78.35 ± 1.47"),
        ("8000", "88.94 ± 1.08", "84.02 ± 0.96"),
        ("12000", "89.11 ± 0.58", "86.41 ± 0.46"),
        ("16000", "89.24 ± 0.77", "87.58 ± 0.79"),
        ("∞", "90.87 ± 0.53", "90.04 ± 0.9"),
    ];

    #[test]
    fn published_coinrun_table_renders_verbatim() {
        let parse = |cell: &str| {
            let (m, s) = cell.split_once(" ± ").unwrap();
            (m.parse::<f64>().unwrap(), s.parse::<f64>().unwrap())
        };
        let rows = TABLE_ONE
            .iter()
            .map(|&(size, train, test)| {
                let (train_mean, train_std) = parse(train);
                let (test_mean, test_std) = parse(test);
                GapRow {
                    size: size.parse().unwrap(),
                    train_mean,
                    train_std,
                    test_mean,
                    test_std,
                    success_rate_percent: test_mean,
                    episodes: 50_000,
                    gap: train_mean - test_mean,
                }
            })
            .collect();
        let report = EvalReport {
            game: Game::CoinRun,
            agent: "nature-cnn".into(),
            metric: "success_pct".into(),
            rows,
        };
        let table = format_table(&report);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].starts_with("# Levels"));
        for (line, (size, train, test)) in lines[1..].iter().zip(TABLE_ONE) {
            let cols: Vec<&str> = line.split("  ").map(str::trim).filter(|c| !c.is_empty()).collect();
            assert_eq!(&cols[..3], [size, train, test], "{line}");
        }
        assert!(lines[1].ends_with("32.66"));
    }
}
