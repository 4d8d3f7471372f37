//! CSV emission with a fixed schema and self-contained matplotlib plot
//! scripts for the shipped presets.
//!
//! Number format: 9 significant decimal digits in scientific notation with a
//! `.` separator and `\n` line endings, so repeated runs produce byte-exact
//! files on every platform.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::config::MetricKind;
use crate::montecarlo::CurveSeries;

/// Fixed CSV header; golden-file tested.
pub const CSV_HEADER: &str = "snr_db,estimate,standard_error,trials_used,analytic";

/// 9 significant digits, scientific; NaN marks "no analytic companion".
pub fn format_metric(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.8e}")
    }
}

/// Renders one curve with its analytic companion column.
pub fn render_series_csv(series: &CurveSeries, analytic: &[f64]) -> String {
    assert_eq!(series.points.len(), analytic.len(), "analytic column length");
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (p, &a) in series.points.iter().zip(analytic) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.snr_db,
            format_metric(p.estimate),
            format_metric(p.standard_error),
            p.trials_used,
            format_metric(a),
        );
    }
    out
}

/// Writes one curve CSV to `path`.
pub fn write_series_csv(
    path: &Path,
    series: &CurveSeries,
    analytic: &[f64],
) -> io::Result<()> {
    fs::write(path, render_series_csv(series, analytic))
}

/// A scenario entry handed to the plot-script generator.
#[derive(Debug, Clone)]
pub struct PlotEntry {
    pub scenario: String,
    pub is_sma: bool,
}

/// Generates a self-contained matplotlib script for one metric of one run,
/// referencing the CSVs next to it. Returns the script text.
pub fn render_plot_script(doc_name: &str, metric: MetricKind, entries: &[PlotEntry]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "#!/usr/bin/env python3");
    let metric_title = match metric {
        MetricKind::Ber => "BER",
        MetricKind::Outage => "outage probability",
        MetricKind::SumRate => "ergodic sum rate",
    };
    let _ = writeln!(
        s,
        "\"\"\"Plot {metric_title} vs average transmitted SNR for the `{doc_name}` run.\n\n\
         Reads the CSVs written next to this script and saves {doc_name}.png.\n\"\"\"\n\
         import pathlib\n\n\
         import matplotlib\n\
         matplotlib.use(\"Agg\")\n\
         import matplotlib.pyplot as plt\n\
         import numpy as np\n\n\
         HERE = pathlib.Path(__file__).resolve().parent\n\n\n\
         def load(name):\n\
         \x20   return np.genfromtxt(HERE / name, delimiter=\",\", names=True)\n\n\n\
         fig, ax = plt.subplots(figsize=(7.0, 5.0))"
    );
    match metric {
        MetricKind::Ber | MetricKind::Outage => {
            let metric_file = if metric == MetricKind::Ber { "ber" } else { "outage" };
            for e in entries {
                for ue in ["ue1", "ue2"] {
                    if metric == MetricKind::Outage && e.is_sma && ue == "ue2" {
                        // The UE-2 outage series of an SMA run is identically
                        // zero (deterministic rate meets the target), so there
                        // is nothing to place on a log axis.
                        let _ = writeln!(
                            s,
                            "# {}_{}_{}.csv omitted: identically zero outage.",
                            metric_file, e.scenario, ue
                        );
                        continue;
                    }
                    let _ = writeln!(
                        s,
                        "d = load(\"{metric_file}_{scn}_{ue}.csv\")\n\
                         mask = d[\"estimate\"] > 0\n\
                         ax.semilogy(d[\"snr_db\"][mask], d[\"estimate\"][mask],\n\
                         \x20           marker=\"o\", label=\"{scn} {ue_up} (sim)\")",
                        scn = e.scenario,
                        ue_up = ue.to_uppercase(),
                    );
                    if e.is_sma {
                        let _ = writeln!(
                            s,
                            "a = np.minimum(d[\"analytic\"], 0.5)\n\
                             amask = a > 0\n\
                             ax.semilogy(d[\"snr_db\"][amask], a[amask],\n\
                             \x20           linestyle=\"--\", label=\"{scn} {ue_up} (analytic)\")",
                            scn = e.scenario,
                            ue_up = ue.to_uppercase(),
                        );
                    }
                }
            }
            let _ = writeln!(s, "ax.set_ylabel(\"{metric_title}\")");
        }
        MetricKind::SumRate => {
            for e in entries {
                let _ = writeln!(
                    s,
                    "d = load(\"sum_rate_{scn}.csv\")\n\
                     ax.plot(d[\"snr_db\"], d[\"estimate\"], marker=\"o\", label=\"{scn} (sim)\")",
                    scn = e.scenario,
                );
                if e.is_sma {
                    let _ = writeln!(
                        s,
                        "ax.plot(d[\"snr_db\"], d[\"analytic\"], linestyle=\"--\", \
                         label=\"{scn} (analytic)\")",
                        scn = e.scenario,
                    );
                }
            }
            let _ = writeln!(s, "ax.set_ylabel(\"sum rate (bits/channel use)\")");
        }
    }
    let _ = writeln!(
        s,
        "ax.set_xlabel(\"average transmitted SNR (dB)\")\n\
         ax.grid(True, which=\"both\", alpha=0.3)\n\
         ax.legend(fontsize=8)\n\
         fig.tight_layout()\n\
         fig.savefig(HERE / \"{doc_name}.png\", dpi=150)\n\
         print(\"wrote\", HERE / \"{doc_name}.png\")"
    );
    s
}

/// CSV file name for one curve of one scenario.
pub fn series_file_name(metric: MetricKind, scenario: &str, user: Option<&str>) -> String {
    match user {
        Some(ue) => format!("{}_{}_{}.csv", metric.name(), scenario, ue),
        None => format!("{}_{}.csv", metric.name(), scenario),
    }
}

/// Writes the plot script after verifying that every CSV it references
/// exists in `dir`; reports the first missing series otherwise.
pub fn emit_plot_script(
    dir: &Path,
    doc_name: &str,
    metric: MetricKind,
    entries: &[PlotEntry],
) -> io::Result<PathBuf> {
    for e in entries {
        let files: Vec<String> = match metric {
            MetricKind::SumRate => vec![series_file_name(metric, &e.scenario, None)],
            _ => vec![
                series_file_name(metric, &e.scenario, Some("ue1")),
                series_file_name(metric, &e.scenario, Some("ue2")),
            ],
        };
        for f in files {
            if !dir.join(&f).is_file() {
                return Err(io::Error::new(
                    io::ErrorKind::NotFound,
                    format!("missing series file {f}"),
                ));
            }
        }
    }
    let name = format!("plot_{doc_name}_{}.py", metric.name());
    let path = dir.join(name);
    fs::write(&path, render_plot_script(doc_name, metric, entries))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{CurvePoint, Metric};

    fn sample_series() -> CurveSeries {
        CurveSeries {
            metric: Metric::BerUe1,
            points: vec![
                CurvePoint {
                    snr_db: 0.0,
                    estimate: 0.023_268_705_377_203_842,
                    standard_error: 1.5e-4,
                    trials_used: 1_000_000,
                },
                CurvePoint {
                    snr_db: 2.5,
                    estimate: 0.0,
                    standard_error: 0.0,
                    trials_used: 1_000_000,
                },
            ],
        }
    }

    #[test]
    fn csv_schema_and_format() {
        let csv = render_series_csv(&sample_series(), &[0.023, f64::NAN]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "0,2.32687054e-2,1.50000000e-4,1000000,2.30000000e-2"
        );
        assert_eq!(lines.next().unwrap(), "2.5,0.00000000e0,0.00000000e0,1000000,nan");
        assert!(lines.next().is_none());
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn plot_script_mentions_every_series() {
        let entries = vec![
            PlotEntry { scenario: "sma".into(), is_sma: true },
            PlotEntry { scenario: "noma".into(), is_sma: false },
        ];
        let script = render_plot_script("fig2", MetricKind::Ber, &entries);
        assert!(script.contains("ber_sma_ue1.csv"));
        assert!(script.contains("ber_sma_ue2.csv"));
        assert!(script.contains("ber_noma_ue1.csv"));
        assert!(script.contains("ber_noma_ue2.csv"));
        assert!(script.contains("semilogy"));
        assert!(script.contains("np.minimum"), "analytic bound is clamped for display");

        let script = render_plot_script("fig4", MetricKind::Outage, &entries);
        assert!(script.contains("outage_sma_ue1.csv"));
        assert!(
            script.contains("omitted: identically zero"),
            "SMA UE-2 outage is skipped with a note"
        );

        let script = render_plot_script("fig3", MetricKind::SumRate, &entries);
        assert!(script.contains("sum_rate_sma.csv"));
        assert!(!script.contains("semilogy"), "rate axis stays linear");
    }

    #[test]
    fn missing_series_reported() {
        let dir = std::env::temp_dir().join("sma_report_missing_series_test");
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        let entries = vec![PlotEntry { scenario: "sma".into(), is_sma: true }];
        let err = emit_plot_script(&dir, "fig2", MetricKind::Ber, &entries).unwrap_err();
        assert_eq!(err.kind(), io::ErrorKind::NotFound);
        let _ = fs::remove_dir_all(&dir);
    }
}
