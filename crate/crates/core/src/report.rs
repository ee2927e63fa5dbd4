//! Communication artifacts: descriptive-statistics tables (CSV and
//! Markdown), labeled SVG histograms, estimator ranking, and the Markdown
//! recommendation report.
//!
//! All rendering is byte-deterministic for identical inputs. Numbers are
//! printed with 6 significant digits, trailing zeros trimmed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::estimators::describe;
use crate::exact::ExactMoments;
use crate::model::EstimatorId;
use crate::simulate::SummaryStats;

/// The results-CSV schema. Bit-exact: tools downstream match on it.
pub const CSV_HEADER: &str = "N,k,estimator,reps,mean,bias,variance,mse";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("no rows to render")]
    EmptyInput,
    #[error("rows span multiple (N, k) cells: ({0}, {1}) and ({2}, {3})")]
    MixedCells(u64, u64, u64, u64),
    #[error("more than one row for estimator `{0}`")]
    DuplicateEstimator(EstimatorId),
    #[error("malformed results file, line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("no estimates to plot")]
    EmptyData,
    #[error("bins must be >= 1")]
    ZeroBins,
    #[error("unknown criterion `{0}` (expected mse, variance, or abs_bias)")]
    UnknownCriterion(String),
}

/// What "best" means when ranking estimators. Lower is better for all
/// three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Criterion {
    #[default]
    Mse,
    Variance,
    AbsBias,
}

impl Criterion {
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::Mse => "mse",
            Criterion::Variance => "variance",
            Criterion::AbsBias => "abs_bias",
        }
    }

    fn value_of(&self, row: &TableRow) -> f64 {
        match self {
            Criterion::Mse => row.mse,
            Criterion::Variance => row.variance,
            Criterion::AbsBias => row.bias.abs(),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mse" => Ok(Criterion::Mse),
            "variance" => Ok(Criterion::Variance),
            "abs_bias" => Ok(Criterion::AbsBias),
            other => Err(ReportError::UnknownCriterion(other.to_string())),
        }
    }
}

/// The `reps` column: a replication count for simulated rows, the word
/// `exact` for exact-moment rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RepsCol {
    Count(u64),
    Exact,
}

impl fmt::Display for RepsCol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepsCol::Exact => f.write_str("exact"),
            RepsCol::Count(c) => write!(f, "{c}"),
        }
    }
}

/// One table row, the common shape of simulated summaries and exact
/// moments.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n: u64,
    pub k: u64,
    pub estimator: EstimatorId,
    pub reps: RepsCol,
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
}

impl From<&SummaryStats> for TableRow {
    fn from(s: &SummaryStats) -> Self {
        TableRow {
            n: s.n,
            k: s.k,
            estimator: s.estimator,
            reps: RepsCol::Count(s.reps),
            mean: s.mean,
            bias: s.bias,
            variance: s.variance,
            mse: s.mse,
        }
    }
}

impl From<&ExactMoments> for TableRow {
    fn from(m: &ExactMoments) -> Self {
        let f = |r: &num_rational::BigRational| r.to_f64().expect("moment fits in f64");
        TableRow {
            n: m.n,
            k: m.k,
            estimator: m.estimator,
            reps: RepsCol::Exact,
            mean: f(&m.mean),
            bias: f(&m.bias),
            variance: f(&m.variance),
            mse: f(&m.mse),
        }
    }
}

/// Renders a number with 6 significant digits, trailing zeros trimmed:
/// `4` stays `4`, `-17.8125` stays `-17.8125`, `23/3` becomes `7.66667`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("scientific round-trip");
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{rounded}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// Renders rows as CSV (exact header [`CSV_HEADER`]) or as a Markdown
/// pipe table with the same columns.
pub fn render_table(rows: &[TableRow], format: TableFormat) -> Result<String, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.n,
                    r.k,
                    r.estimator,
                    r.reps,
                    format_sig6(r.mean),
                    format_sig6(r.bias),
                    format_sig6(r.variance),
                    format_sig6(r.mse)
                ));
            }
        }
        TableFormat::Markdown => {
            out.push_str("| N | k | estimator | reps | mean | bias | variance | mse |\n");
            out.push_str("|---|---|-----------|------|------|------|----------|-----|\n");
            for r in rows {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
                    r.n,
                    r.k,
                    r.estimator,
                    r.reps,
                    format_sig6(r.mean),
                    format_sig6(r.bias),
                    format_sig6(r.variance),
                    format_sig6(r.mse)
                ));
            }
        }
    }
    Ok(out)
}

/// Parses a results CSV back into rows. The header must match
/// [`CSV_HEADER`] exactly.
pub fn parse_results_csv(text: &str) -> Result<Vec<TableRow>, ReportError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(ReportError::Malformed {
        line: 1,
        msg: "empty file".into(),
    })?;
    if header.trim_end() != CSV_HEADER {
        return Err(ReportError::Malformed {
            line: 1,
            msg: format!("expected header `{CSV_HEADER}`, got `{header}`"),
        });
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(ReportError::Malformed {
                line: lineno,
                msg: format!("expected 8 fields, got {}", fields.len()),
            });
        }
        let bad = |what: &str, token: &str| ReportError::Malformed {
            line: lineno,
            msg: format!("bad {what} `{token}`"),
        };
        let n: u64 = fields[0].parse().map_err(|_| bad("N", fields[0]))?;
        let k: u64 = fields[1].parse().map_err(|_| bad("k", fields[1]))?;
        let estimator =
            EstimatorId::from_str(fields[2]).map_err(|_| bad("estimator", fields[2]))?;
        let reps = if fields[3] == "exact" {
            RepsCol::Exact
        } else {
            RepsCol::Count(fields[3].parse().map_err(|_| bad("reps", fields[3]))?)
        };
        let num = |what: &str, token: &str| -> Result<f64, ReportError> {
            let v: f64 = token.parse().map_err(|_| bad(what, token))?;
            if !v.is_finite() {
                return Err(bad(what, token));
            }
            Ok(v)
        };
        rows.push(TableRow {
            n,
            k,
            estimator,
            reps,
            mean: num("mean", fields[4])?,
            bias: num("bias", fields[5])?,
            variance: num("variance", fields[6])?,
            mse: num("mse", fields[7])?,
        });
    }
    Ok(rows)
}

/// Ranks one cell's estimators ascending by the criterion; ties broken by
/// canonical estimator order. Input must be one row per estimator, all
/// from the same (N, k).
pub fn rank_estimators(
    rows: &[TableRow],
    criterion: Criterion,
) -> Result<Vec<(EstimatorId, f64)>, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let cell = (rows[0].n, rows[0].k);
    let mut seen: Vec<EstimatorId> = Vec::new();
    for r in rows {
        if (r.n, r.k) != cell {
            return Err(ReportError::MixedCells(cell.0, cell.1, r.n, r.k));
        }
        if seen.contains(&r.estimator) {
            return Err(ReportError::DuplicateEstimator(r.estimator));
        }
        seen.push(r.estimator);
    }
    let mut ranked: Vec<(EstimatorId, f64)> = rows
        .iter()
        .map(|r| (r.estimator, criterion.value_of(r)))
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a frequency histogram as a standalone SVG 1.1 document with a
/// visible title and both axis labels. Equal-width bins span [min, max];
/// a degenerate span (all values equal) is widened to one unit so the
/// single bar still draws.
pub fn render_histogram_svg(
    estimates: &[f64],
    title: &str,
    x_label: &str,
    y_label: &str,
    bins: usize,
) -> Result<String, ReportError> {
    if estimates.is_empty() {
        return Err(ReportError::EmptyData);
    }
    if bins == 0 {
        return Err(ReportError::ZeroBins);
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in estimates {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let (span_lo, span_hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
    let width = (span_hi - span_lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in estimates {
        let idx = (((v - span_lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let max_count = *counts.iter().max().expect("at least one bin") as f64;

    // fixed canvas; all coordinates printed with 2 decimals for
    // byte-deterministic output
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 60.0;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let base_y = H - BOTTOM;

    let mut svg = String::new();
    svg.push_str(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    svg.push('\n');
    svg.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text class="title" x="{:.2}" y="28" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        W / 2.0,
        xml_escape(title)
    ));
    svg.push('\n');

    let bar_w = plot_w / bins as f64;
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let h = plot_h * c as f64 / max_count;
        let x = LEFT + i as f64 * bar_w;
        svg.push_str(&format!(
            r##"<rect class="bar" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4878a8" stroke="white" stroke-width="0.5"/>"##,
            x,
            base_y - h,
            bar_w,
            h
        ));
        svg.push('\n');
    }

    // axes
    svg.push_str(&format!(
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{base_y}" stroke="black"/>"#
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<line x1="{LEFT}" y1="{base_y}" x2="{:.2}" y2="{base_y}" stroke="black"/>"#,
        W - RIGHT
    ));
    svg.push('\n');

    // tick labels: x range endpoints, y zero and max count
    svg.push_str(&format!(
        r#"<text x="{LEFT}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
        base_y + 16.0,
        format_sig6(span_lo)
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
        W - RIGHT,
        base_y + 16.0,
        format_sig6(span_hi)
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">0</text>"#,
        LEFT - 6.0,
        base_y + 4.0
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
        LEFT - 6.0,
        TOP + 4.0,
        max_count as u64
    ));
    svg.push('\n');

    // axis labels
    svg.push_str(&format!(
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        LEFT + plot_w / 2.0,
        H - 16.0,
        xml_escape(x_label)
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<text class="y-label" x="18" y="{0:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
        TOP + plot_h / 2.0,
        xml_escape(y_label)
    ));
    svg.push('\n');
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// One cell's section of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSection {
    pub n: u64,
    pub k: u64,
    pub table_markdown: String,
    pub ranking: Vec<(EstimatorId, f64)>,
    /// Whether the ranking came from simulated rows (exact rows are the
    /// fallback when a cell has no simulated rows).
    pub ranked_on_simulation: bool,
}

/// Everything the Markdown report is assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub sections: Vec<CellSection>,
    /// Overall ranking across cells: ascending mean per-cell rank, ties
    /// broken by canonical estimator order. Pairs are (id, mean rank).
    pub ranking: Vec<(EstimatorId, f64)>,
    /// Names `ranking[0]` and cites its bias and MSE from the tables.
    pub recommendation: String,
    pub criterion: Criterion,
    pub plot_refs: Vec<String>,
}

/// Groups rows into cells, ranks each cell, aggregates an overall
/// ranking, and writes the recommendation paragraph.
pub fn build_report(
    rows: &[TableRow],
    criterion: Criterion,
    plot_refs: &[String],
) -> Result<ReportBundle, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::EmptyInput);
    }

    let mut cells: BTreeMap<(u64, u64), Vec<TableRow>> = BTreeMap::new();
    for r in rows {
        cells.entry((r.n, r.k)).or_default().push(r.clone());
    }

    let mut sections = Vec::new();
    let mut rank_totals: BTreeMap<EstimatorId, (f64, u64)> = BTreeMap::new();
    for (&(n, k), cell_rows) in &cells {
        let mut ordered = cell_rows.clone();
        ordered.sort_by_key(|r| (r.estimator, r.reps));
        let table_markdown = render_table(&ordered, TableFormat::Markdown)?;

        let sim_rows: Vec<TableRow> = ordered
            .iter()
            .filter(|r| r.reps != RepsCol::Exact)
            .cloned()
            .collect();
        let exact_rows: Vec<TableRow> = ordered
            .iter()
            .filter(|r| r.reps == RepsCol::Exact)
            .cloned()
            .collect();
        let ranked_on_simulation = !sim_rows.is_empty();
        let basis = if ranked_on_simulation { &sim_rows } else { &exact_rows };
        let ranking = rank_estimators(basis, criterion)?;
        for (pos, &(id, _)) in ranking.iter().enumerate() {
            let entry = rank_totals.entry(id).or_insert((0.0, 0));
            entry.0 += (pos + 1) as f64;
            entry.1 += 1;
        }
        sections.push(CellSection {
            n,
            k,
            table_markdown,
            ranking,
            ranked_on_simulation,
        });
    }

    let mut overall: Vec<(EstimatorId, f64)> = rank_totals
        .iter()
        .map(|(&id, &(total, count))| (id, total / count as f64))
        .collect();
    overall.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let winner = overall[0].0;
    let firsts = sections
        .iter()
        .filter(|s| s.ranking.first().map(|r| r.0) == Some(winner))
        .count();
    // support numbers come from the largest setting (last cell in order),
    // preferring its simulated row
    let support = sections.last().expect("at least one cell");
    let support_rows = &cells[&(support.n, support.k)];
    let support_row = support_rows
        .iter()
        .filter(|r| r.estimator == winner)
        .min_by_key(|r| r.reps)
        .or_else(|| support_rows.iter().find(|r| r.estimator == winner));
    let recommendation = match support_row {
        Some(row) => format!(
            "Recommended estimator: **{}** ({}). It ranks first by {} in {} of {} setting(s) \
             (mean rank {}). At N = {}, k = {} its bias is {} and its MSE is {}.",
            winner,
            describe(winner).name,
            criterion,
            firsts,
            sections.len(),
            format_sig6(overall[0].1),
            row.n,
            row.k,
            format_sig6(row.bias),
            format_sig6(row.mse),
        ),
        None => format!(
            "Recommended estimator: **{}** ({}). It ranks first by {} in {} of {} setting(s) \
             (mean rank {}).",
            winner,
            describe(winner).name,
            criterion,
            firsts,
            sections.len(),
            format_sig6(overall[0].1),
        ),
    };

    Ok(ReportBundle {
        sections,
        ranking: overall,
        recommendation,
        criterion,
        plot_refs: plot_refs.to_vec(),
    })
}

fn render_ranking(ranking: &[(EstimatorId, f64)]) -> String {
    ranking
        .iter()
        .enumerate()
        .map(|(i, (id, v))| format!("{}. {} ({})", i + 1, id, format_sig6(*v)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders the full Markdown report: settings summary, one table section
/// per cell in (N, k) order, per-cell and overall rankings, the
/// recommendation, and plot references when plots exist.
pub fn render_report(
    rows: &[TableRow],
    criterion: Criterion,
    plot_refs: &[String],
) -> Result<String, ReportError> {
    let bundle = build_report(rows, criterion, plot_refs)?;
    let mut out = String::new();
    out.push_str("# Population-size estimator comparison\n\n");

    out.push_str("## Settings\n\n");
    let ns: Vec<String> = {
        let mut v: Vec<u64> = bundle.sections.iter().map(|s| s.n).collect();
        v.sort_unstable();
        v.dedup();
        v.into_iter().map(|n| n.to_string()).collect()
    };
    let ks: Vec<String> = {
        let mut v: Vec<u64> = bundle.sections.iter().map(|s| s.k).collect();
        v.sort_unstable();
        v.dedup();
        v.into_iter().map(|k| k.to_string()).collect()
    };
    out.push_str(&format!(
        "- {} cell(s): N in {{{}}}, k in {{{}}}\n- ranking criterion: {} (lower is better)\n\n",
        bundle.sections.len(),
        ns.join(", "),
        ks.join(", "),
        bundle.criterion
    ));

    for s in &bundle.sections {
        out.push_str(&format!("## N = {}, k = {}\n\n", s.n, s.k));
        out.push_str(&s.table_markdown);
        out.push('\n');
        out.push_str(&format!(
            "Ranking by {} ({} rows): {}\n\n",
            bundle.criterion,
            if s.ranked_on_simulation { "simulated" } else { "exact" },
            render_ranking(&s.ranking)
        ));
    }

    out.push_str("## Overall ranking\n\n");
    out.push_str(&format!(
        "By mean per-cell rank: {}\n\n",
        render_ranking(&bundle.ranking)
    ));

    out.push_str("## Recommendation\n\n");
    out.push_str(&bundle.recommendation);
    out.push('\n');

    if !bundle.plot_refs.is_empty() {
        out.push_str("\n## Plots\n\n");
        for p in &bundle.plot_refs {
            out.push_str(&format!("- {p}\n"));
        }
    }
    Ok(out)
}
