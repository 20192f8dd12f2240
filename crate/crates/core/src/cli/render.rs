use serde_json::{json, Value};

use super::Format;
use crate::bounds::{BoundEntry, BoundSet, ConjectureStatus, LinearBounds, LowerBoundKind, RatioColumn};
use crate::delta_verify::CorpusReport;
use crate::solver::{ReducedHamiltonian, SolverConfig, SpectrumResult, LINEAR_REFERENCE_ENERGY};

pub const UNITS: &str = "hbar = c = 1";

const UPPER_LABEL: &str = "Gaussian trial state in Jacobi coordinates, minimized over its scale";

/// Six significant digits, fixed notation for moderate magnitudes.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    let exp = rounded.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        format!("{:.*}", (5 - exp) as usize, rounded)
    } else {
        format!("{x:.5e}")
    }
}

fn opt6(x: Option<f64>) -> String {
    x.map(format_sig6).unwrap_or_else(|| "-".into())
}

/// Shortest round-trip representation, as in the JSON output.
fn full(x: f64) -> String {
    match serde_json::Number::from_f64(x) {
        Some(n) => n.to_string(),
        None => format_sig6(x),
    }
}

fn opt_full(x: Option<f64>) -> String {
    x.map(full).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
    format!("# units: {UNITS}\n{body}")
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

/// One run rendered in all three formats.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: String,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                serde_json::to_string_pretty(&self.json).expect("serializable report") + "\n"
            }
            Format::Text => self.text.clone(),
            Format::Csv => self.csv.clone(),
        }
    }

    pub fn solve(h: &ReducedHamiltonian, cfg: &SolverConfig, r: &SpectrumResult) -> Self {
        let json = json!({
            "report": "solve",
            "units": UNITS,
            "hamiltonian": {
                "beta": h.beta,
                "lambda": h.lambda,
                "gamma": h.gamma,
                "mass": h.mass,
                "potential": h.potential.to_string(),
            },
            "solver_config": solver_config_json(cfg),
            "ground_energy": r.ground_energy,
            "optimal_basis_scale": r.optimal_basis_scale,
            "convergence_estimate": r.convergence_estimate,
            "comparison_basis_size": r.comparison_basis_size,
            "quadrature_change": r.quadrature_change,
            "at_scale_boundary": r.at_scale_boundary,
            "effective_coulomb_coupling": h.effective_coulomb_coupling(),
            "coefficients": r.coefficients,
            "warnings": r.warnings,
        });
        let scalars = [
            ("ground_energy", r.ground_energy),
            ("optimal_basis_scale", r.optimal_basis_scale),
            ("convergence_estimate", r.convergence_estimate),
            ("quadrature_change", r.quadrature_change),
            ("effective_coulomb_coupling", h.effective_coulomb_coupling()),
        ];
        let mut text = format!(
            "# salbound solve  units: {UNITS}\n\
             # H = {} sqrt({} p^2 + {}^2) + {} V(r), V = {}\n\
             # basis size {}, quadrature order {}\n",
            format_sig6(h.beta),
            format_sig6(h.lambda),
            format_sig6(h.mass),
            format_sig6(h.gamma),
            h.potential,
            r.basis_size,
            cfg.quadrature_order,
        );
        for (name, v) in scalars {
            text += &format!("{name}: {}\n", format_sig6(v));
        }
        text += &format!("at_scale_boundary: {}\n", r.at_scale_boundary);
        for w in &r.warnings {
            text += &format!("warning: {w}\n");
        }
        let mut rows: Vec<Vec<String>> = scalars
            .iter()
            .map(|(n, v)| vec![n.to_string(), full(*v)])
            .collect();
        rows.extend(
            r.coefficients
                .iter()
                .enumerate()
                .map(|(i, c)| vec![format!("coefficient_{i}"), full(*c)]),
        );
        Self {
            json,
            text,
            csv: csv_text(&["quantity", "value"], rows),
        }
    }

    pub fn bounds(set: &BoundSet, cfg: &SolverConfig) -> Self {
        let p = &set.problem;
        let entries: [(LowerBoundKind, Option<&BoundEntry>); 4] = [
            (LowerBoundKind::N2, Some(&set.lower_n2)),
            (LowerBoundKind::N3, set.lower_n3.as_ref()),
            (LowerBoundKind::N4, set.lower_n4.as_ref()),
            (LowerBoundKind::Conjectured, Some(&set.lower_conjectured)),
        ];
        let up = &set.upper_gaussian;
        let mut bounds = serde_json::Map::new();
        let mut provenance = serde_json::Map::new();
        let mut diagnostics = serde_json::Map::new();
        for (kind, entry) in &entries {
            bounds.insert(kind.key().into(), json!(entry.map(|e| e.value)));
            provenance.insert(kind.key().into(), json!(kind.label()));
            diagnostics.insert(
                kind.key().into(),
                match entry {
                    Some(e) => json!({
                        "reduced_lambda": e.reduced.lambda,
                        "reduced_gamma": e.reduced.gamma,
                        "reduced_ground_energy": e.spectrum.ground_energy,
                        "conservative_value": e.conservative_value,
                        "convergence_estimate": e.spectrum.convergence_estimate,
                        "optimal_basis_scale": e.spectrum.optimal_basis_scale,
                        "quadrature_change": e.spectrum.quadrature_change,
                        "at_scale_boundary": e.spectrum.at_scale_boundary,
                        "warnings": e.spectrum.warnings,
                    }),
                    None => Value::Null,
                },
            );
        }
        bounds.insert("upper".into(), json!(up.value));
        provenance.insert("upper".into(), json!(UPPER_LABEL));
        diagnostics.insert(
            "upper".into(),
            json!({
                "optimal_scale": up.scale,
                "at_scale_boundary": up.at_scale_boundary,
                "warnings": up.warnings,
            }),
        );
        let (status, reason) = match &set.conjecture_status {
            ConjectureStatus::Proven(r) => ("proven", Some(r.as_str())),
            ConjectureStatus::Conjectured => ("conjectured", None),
        };
        let json = json!({
            "report": "bounds",
            "units": UNITS,
            "n": p.n,
            "mass": p.mass,
            "potential": p.potential.to_string(),
            "bounds": bounds,
            "status": status,
            "status_reason": reason,
            "absent": set.absent,
            "provenance": provenance,
            "diagnostics": diagnostics,
            "solver_config": solver_config_json(cfg),
        });

        let mut rows = Vec::new();
        let mut text_rows = Vec::new();
        for (kind, entry) in &entries {
            let note = set.absent.get(kind.key()).cloned().unwrap_or_default();
            rows.push(vec![
                kind.key().to_string(),
                opt_full(entry.map(|e| e.value)),
                opt_full(entry.map(|e| e.conservative_value)),
                kind.label().to_string(),
                note.clone(),
            ]);
            text_rows.push(vec![
                kind.key().to_string(),
                opt6(entry.map(|e| e.value)),
                opt6(entry.map(|e| e.conservative_value)),
                if note.is_empty() { kind.label().to_string() } else { note },
            ]);
        }
        rows.push(vec!["upper".into(), full(up.value), String::new(), UPPER_LABEL.into(), String::new()]);
        text_rows.push(vec!["upper".into(), format_sig6(up.value), "-".into(), UPPER_LABEL.into()]);
        let mut text = format!(
            "# salbound bounds  units: {UNITS}\n# N = {}, m = {}, V = {}\n",
            p.n,
            format_sig6(p.mass),
            p.potential
        );
        text += &table(&["bound", "value", "conservative", "note"], &text_rows);
        text += &format!(
            "conjectured bound status: {status}{}\n",
            reason.map(|r| format!(" ({r})")).unwrap_or_default()
        );
        for (kind, entry) in &entries {
            for w in entry.iter().flat_map(|e| &e.spectrum.warnings) {
                text += &format!("warning [{}]: {w}\n", kind.key());
            }
        }
        for w in &up.warnings {
            text += &format!("warning [upper]: {w}\n");
        }
        Self {
            json,
            text,
            csv: csv_text(&["bound", "value", "conservative_value", "provenance", "note"], rows),
        }
    }

    pub fn linear_table(rows: &[LinearBounds]) -> Self {
        let json = json!({
            "report": "linear-table",
            "units": UNITS,
            "reference_energy": LINEAR_REFERENCE_ENERGY,
            "rows": rows.iter().map(|r| json!({
                "n": r.n,
                "n2": r.lower_n2,
                "n3": r.lower_n3,
                "n4": r.lower_n4,
                "conjectured": r.lower_conjectured,
                "upper": r.upper_gaussian,
            })).collect::<Vec<_>>(),
        });
        let header = ["n", "n2", "n3", "n4", "conjectured", "upper"];
        let cells = |f: fn(f64) -> String, g: fn(Option<f64>) -> String| -> Vec<Vec<String>> {
            rows.iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        f(r.lower_n2),
                        g(r.lower_n3),
                        g(r.lower_n4),
                        f(r.lower_conjectured),
                        f(r.upper_gaussian),
                    ]
                })
                .collect()
        };
        let text = format!(
            "# salbound linear-table  units: {UNITS}\n# V(r) = r, m = 0, e = {LINEAR_REFERENCE_ENERGY}\n{}",
            table(&header, &cells(format_sig6, opt6))
        );
        Self {
            json,
            text,
            csv: csv_text(&header, cells(full, opt_full)),
        }
    }

    pub fn table1(columns: &[RatioColumn]) -> Self {
        let labels = ["R_N/2", "R_N/3", "R_N/4", "R_c"];
        let pick = |c: &RatioColumn, row: usize| match row {
            0 => c.r_n2,
            1 => c.r_n3,
            2 => c.r_n4,
            _ => c.r_c,
        };
        let names: Vec<String> = columns.iter().map(|c| c.column.to_string()).collect();
        let json = json!({
            "report": "table1",
            "units": UNITS,
            "reference_energy": LINEAR_REFERENCE_ENERGY,
            "columns": names,
            "rows": labels.iter().enumerate().map(|(i, l)| json!({
                "label": l,
                "values": columns.iter().map(|c| pick(c, i)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        });
        let mut header = vec!["".to_string()];
        header.extend(names.iter().map(|n| format!("N={n}")));
        let text_rows: Vec<Vec<String>> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let mut row = vec![l.to_string()];
                row.extend(columns.iter().map(|c| opt6(pick(c, i))));
                row
            })
            .collect();
        let text = format!(
            "# salbound table1  units: {UNITS}\n# upper/lower bound ratios, V(r) = r, m = 0\n{}",
            table(&header.iter().map(String::as_str).collect::<Vec<_>>(), &text_rows)
        );
        let mut rows = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            for (c, name) in columns.iter().zip(&names) {
                if let Some(v) = pick(c, i) {
                    rows.push(vec![l.to_string(), name.clone(), full(v)]);
                }
            }
        }
        Self {
            json,
            text,
            csv: csv_text(&["row_label", "n", "value"], rows),
        }
    }

    pub fn verify_delta(r: &CorpusReport) -> Self {
        let c = &r.config;
        let verdict = verdict_str(r);
        let results: Vec<Value> = r
            .results
            .iter()
            .map(|s| {
                json!({
                    "index": s.index,
                    "sample_seed": s.sample_seed,
                    "components": s.state.components.len(),
                    "sample_count": s.stats.sample_count,
                    "mean": s.stats.mean,
                    "standard_error": s.stats.standard_error,
                    "z_score": s.stats.z_score(),
                    "negative": s.negative,
                    "k": s.stats.k,
                    "k_standard_error": s.stats.k_standard_error,
                    "q": s.stats.q,
                    "q_standard_error": s.stats.q_standard_error,
                    "symmetry_consistent": s.stats.symmetry_consistent(),
                    "state": s.state,
                })
            })
            .collect();
        let json = json!({
            "report": "verify-delta",
            "units": UNITS,
            "n": c.n,
            "mass": c.mass,
            "master_seed": c.seed,
            "states": c.states,
            "samples_per_state": c.samples,
            "shard_count": c.shards,
            "regime": r.regime,
            "regime_label": r.regime_label,
            "verdict": verdict,
            "finding_count": r.findings.len(),
            "results": results,
            "findings": r.findings,
        });

        let n = c.n;
        let mut header: Vec<String> = [
            "state_index", "sample_seed", "components", "mean", "standard_error", "z_score", "negative",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((1..=n).map(|i| format!("k_{i}")));
        for i in 1..=n {
            for j in i + 1..=n {
                header.push(format!("q_{i}_{j}"));
            }
        }
        let row = |s: &crate::delta_verify::StateResult, f: &dyn Fn(f64) -> String| -> Vec<String> {
            let mut row = vec![
                s.index.to_string(),
                s.sample_seed.to_string(),
                s.state.components.len().to_string(),
                f(s.stats.mean),
                f(s.stats.standard_error),
                f(s.stats.z_score()),
                s.negative.to_string(),
            ];
            row.extend(s.stats.k.iter().map(|&v| f(v)));
            row.extend(s.stats.q.iter().map(|&v| f(v)));
            row
        };
        let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
        let text_rows: Vec<Vec<String>> = r.results.iter().map(|s| row(s, &format_sig6)).collect();
        let mut text = format!(
            "# salbound verify-delta  units: {UNITS}\n\
             # N = {}, m = {}, {} states x {} samples, master seed {}, {} shards\n",
            n,
            format_sig6(c.mass),
            c.states,
            c.samples,
            c.seed,
            c.shards
        );
        text += &table(&header_ref, &text_rows);
        text += &format!(
            "verdict: {verdict} ({} of {} states below -3 standard errors; {})\n",
            r.findings.len(),
            r.results.len(),
            r.regime_label
        );
        Self {
            json,
            text,
            csv: csv_text(&header_ref, r.results.iter().map(|s| row(s, &full)).collect()),
        }
    }
}

fn verdict_str(r: &CorpusReport) -> &'static str {
    match r.verdict {
        crate::delta_verify::Verdict::AllNonnegative => "all-nonnegative",
        crate::delta_verify::Verdict::Findings => "findings",
    }
}

fn solver_config_json(cfg: &SolverConfig) -> Value {
    json!({
        "basis_size": cfg.basis_size,
        "quadrature_order": cfg.quadrature_order,
        "scale_search_interval": [cfg.scale_search_interval.0, cfg.scale_search_interval.1],
        "scale_tolerance": cfg.scale_tolerance,
    })
}

/// Negative-mean states with everything needed to reproduce them.
pub fn findings_document(r: &CorpusReport) -> String {
    let doc = json!({
        "report": "delta-findings",
        "units": UNITS,
        "n": r.config.n,
        "mass": r.config.mass,
        "master_seed": r.config.seed,
        "shard_count": r.config.shards,
        "samples_per_state": r.config.samples,
        "regime": r.regime,
        "regime_label": r.regime_label,
        "findings": r.findings,
    });
    serde_json::to_string_pretty(&doc).expect("serializable findings") + "\n"
}
