//! Report structures and rendering.
//!
//! Every report has a human rendering and a machine-readable JSON rendering
//! that mirror each other field for field. Values are kept at full precision
//! until output time; the human form rounds metrics to 3 decimals and test
//! statistics to 3-4 digits, the JSON form serializes the full `f64`.
//! Non-finite z statistics (possible when both variance terms vanish)
//! appear as `null` in JSON together with `p_value = 0`.

use serde::Serialize;

use sepaudit_core::pairwise::ComparativeRates;
use sepaudit_core::pointwise::GroupRates;
use sepaudit_core::stats::TestVerdict;

/// Version of the machine-readable schema; bumped on any breaking change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct HypothesisSection {
    pub name: &'static str,
    pub statement: &'static str,
    pub z: f64,
    pub p_value: f64,
    pub rejected: bool,
    pub s2_left: f64,
    pub s2_right: f64,
    pub n_left: f64,
    pub n_right: f64,
}

#[derive(Serialize)]
pub struct WarningSection {
    pub stratum: String,
    pub n: f64,
}

#[derive(Serialize)]
pub struct RatesSection {
    pub tpr_a1: f64,
    pub tpr_a0: f64,
    pub fpr_a1: f64,
    pub fpr_a0: f64,
    pub n_t1: f64,
    pub n_t0: f64,
    pub n_f1: f64,
    pub n_f0: f64,
}

#[derive(Serialize)]
pub struct BucketSection {
    pub groups: String,
    pub tpr: f64,
    pub support: f64,
}

#[derive(Serialize)]
pub struct EvaluateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: String,
    pub alpha: f64,
    pub points: usize,
    pub mode: String,
    pub rates: RatesSection,
    pub eod: f64,
    pub aod: f64,
    pub hypotheses: Vec<HypothesisSection>,
    pub warnings: Vec<WarningSection>,
    pub violated: bool,
    pub verdict: &'static str,
}

#[derive(Serialize)]
pub struct PairingSection {
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mode: String,
}

#[derive(Serialize)]
pub struct EvaluatePairsReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: String,
    pub alpha: f64,
    pub pairs: usize,
    pub discarded_ties: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<PairingSection>,
    pub buckets: Vec<BucketSection>,
    pub hypotheses: Vec<HypothesisSection>,
    pub warnings: Vec<WarningSection>,
    pub violated: bool,
    pub verdict: &'static str,
}

#[derive(Serialize)]
pub struct BetaSection {
    pub name: &'static str,
    pub beta: f64,
}

#[derive(Serialize)]
pub struct CountSection {
    pub stratum: String,
    pub n: f64,
}

#[derive(Serialize)]
pub struct PowerSection {
    pub size: u64,
    pub betas: Vec<BetaSection>,
    pub beta_composed: f64,
    pub power: f64,
    pub effective_counts: Vec<CountSection>,
}

#[derive(Serialize)]
pub struct MatchSection {
    pub n: u64,
    pub separation_power: f64,
    pub n_p: u64,
    pub ratio: f64,
    pub comparative_power: f64,
    pub no_detectable_effect: bool,
}

#[derive(Serialize)]
pub struct PowerReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: String,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<PowerSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparative: Option<PowerSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched: Option<MatchSection>,
}

#[derive(Serialize)]
pub struct SimulateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: String,
    pub alpha: f64,
    pub criterion: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_p: Option<u64>,
    pub replicates: u64,
    pub seed: u64,
    pub expected_power: f64,
    pub detection_frequency: f64,
    pub errored_replicates: u64,
}

#[derive(Serialize)]
pub struct WeightCell {
    pub a: u8,
    pub y: u8,
    pub count: u64,
    pub w: f64,
}

#[derive(Serialize)]
pub struct WeightsReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub input: String,
    pub scheme: String,
    pub rows: usize,
    pub weights: Vec<WeightCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

pub fn hypothesis_sections(verdict: &TestVerdict) -> Vec<HypothesisSection> {
    verdict
        .results
        .iter()
        .map(|r| HypothesisSection {
            name: r.hypothesis.name(),
            statement: r.hypothesis.statement(),
            z: r.z,
            p_value: r.p_value,
            rejected: r.rejected,
            s2_left: r.s2_left,
            s2_right: r.s2_right,
            n_left: r.n_left,
            n_right: r.n_right,
        })
        .collect()
}

pub fn warning_sections(verdict: &TestVerdict) -> Vec<WarningSection> {
    verdict
        .warnings
        .iter()
        .map(|w| WarningSection {
            stratum: w.stratum.clone(),
            n: w.n,
        })
        .collect()
}

pub fn rates_section(r: &GroupRates) -> RatesSection {
    RatesSection {
        tpr_a1: r.tpr_a1,
        tpr_a0: r.tpr_a0,
        fpr_a1: r.fpr_a1,
        fpr_a0: r.fpr_a0,
        n_t1: r.n_t1,
        n_t0: r.n_t0,
        n_f1: r.n_f1,
        n_f0: r.n_f0,
    }
}

pub fn bucket_sections(rates: &ComparativeRates) -> Vec<BucketSection> {
    rates
        .iter()
        .map(|(gp, b)| BucketSection {
            groups: gp.to_string(),
            tpr: b.tpr,
            support: b.support,
        })
        .collect()
}

pub fn verdict_word(violated: bool) -> &'static str {
    if violated {
        "violated"
    } else {
        "satisfied"
    }
}

fn fmt_p(p: f64) -> String {
    if p > 0.0 && p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

fn push_hypotheses(out: &mut String, hypotheses: &[HypothesisSection]) {
    out.push_str(&format!(
        "  {:<22} {:>8} {:>10}  decision\n",
        "hypothesis", "z", "p"
    ));
    for h in hypotheses {
        out.push_str(&format!(
            "  {:<22} {:>8.3} {:>10}  {}\n",
            h.statement,
            h.z,
            fmt_p(h.p_value),
            if h.rejected { "rejected" } else { "accepted" }
        ));
    }
}

fn push_warnings(out: &mut String, warnings: &[WarningSection]) {
    for w in warnings {
        out.push_str(&format!(
            "  warning: stratum {} has only {} samples (< 30); the normal approximation is shaky\n",
            w.stratum, w.n
        ));
    }
}

impl EvaluateReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("separation audit: {}\n", self.input));
        out.push_str(&format!(
            "  {} points ({}), alpha = {:.3}\n\n",
            self.points, self.mode, self.alpha
        ));
        out.push_str(&format!(
            "  {:<6} {:>8} {:>8} {:>8}\n",
            "rate", "A=1", "A=0", "gap"
        ));
        out.push_str(&format!(
            "  {:<6} {:>8.3} {:>8.3} {:>8.3}\n",
            "TPR",
            self.rates.tpr_a1,
            self.rates.tpr_a0,
            self.rates.tpr_a1 - self.rates.tpr_a0
        ));
        out.push_str(&format!(
            "  {:<6} {:>8.3} {:>8.3} {:>8.3}\n",
            "FPR",
            self.rates.fpr_a1,
            self.rates.fpr_a0,
            self.rates.fpr_a1 - self.rates.fpr_a0
        ));
        out.push_str(&format!(
            "  EOD = {:.3}, AOD = {:.3}\n\n",
            self.eod, self.aod
        ));
        push_hypotheses(&mut out, &self.hypotheses);
        push_warnings(&mut out, &self.warnings);
        out.push_str(&format!("\n  separation {}\n", self.verdict.to_uppercase()));
        out
    }
}

impl EvaluatePairsReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("comparative-separation audit: {}\n", self.input));
        out.push_str(&format!(
            "  {} pairs ({} tied draws discarded), alpha = {:.3}\n",
            self.pairs, self.discarded_ties, self.alpha
        ));
        if let Some(p) = &self.pairing {
            match (p.method, p.n_p, p.seed) {
                ("sampled", Some(n_p), Some(seed)) => out.push_str(&format!(
                    "  pairing: {n_p} sampled pairs from {} points, seed = {seed}\n",
                    p.mode
                )),
                _ => out.push_str(&format!("  pairing: exhaustive over {} points\n", p.mode)),
            }
        }
        out.push('\n');
        out.push_str(&format!(
            "  {:<8} {:>8} {:>10}\n",
            "bucket", "tpr", "support"
        ));
        for b in &self.buckets {
            out.push_str(&format!(
                "  {:<8} {:>8.3} {:>10}\n",
                b.groups, b.tpr, b.support
            ));
        }
        out.push('\n');
        push_hypotheses(&mut out, &self.hypotheses);
        push_warnings(&mut out, &self.warnings);
        out.push_str(&format!(
            "\n  comparative separation {}\n",
            self.verdict.to_uppercase()
        ));
        out
    }
}

fn push_power_section(out: &mut String, label: &str, size_label: &str, s: &PowerSection) {
    out.push_str(&format!("  {label} at {size_label} = {}:\n", s.size));
    let betas: Vec<String> = s
        .betas
        .iter()
        .map(|b| format!("beta[{}] = {:.4}", b.name, b.beta))
        .collect();
    out.push_str(&format!(
        "    {}, composed beta = {:.4}, power = {:.4}\n",
        betas.join(", "),
        s.beta_composed,
        s.power
    ));
    let counts: Vec<String> = s
        .effective_counts
        .iter()
        .map(|c| format!("{} = {:.2}", c.stratum, c.n))
        .collect();
    out.push_str(&format!("    expected counts: {}\n", counts.join(", ")));
}

impl PowerReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "power analysis: {} (alpha = {:.3})\n",
            self.input, self.alpha
        ));
        if let Some(s) = &self.separation {
            push_power_section(&mut out, "separation", "n", s);
        }
        if let Some(s) = &self.comparative {
            push_power_section(&mut out, "comparative separation", "n_p", s);
        }
        if let Some(m) = &self.matched {
            out.push_str(&format!(
                "  matched budget: separation power {:.4} at n = {} is reached by n_p = {} \
                 (ratio {:.3}, comparative power {:.4})\n",
                m.separation_power, m.n, m.n_p, m.ratio, m.comparative_power
            ));
            if m.no_detectable_effect {
                out.push_str(
                    "  note: the distribution satisfies separation; power does not depend on \
                     the sample size, minimum budget returned\n",
                );
            }
        }
        out
    }
}

impl SimulateReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("detection study: {}\n", self.input));
        let size = match (self.n, self.n_p) {
            (Some(n), _) => format!("n = {n}"),
            (_, Some(n_p)) => format!("n_p = {n_p}"),
            _ => String::new(),
        };
        out.push_str(&format!(
            "  criterion = {}, {size}, replicates = {}, seed = {}, alpha = {:.3}\n\n",
            self.criterion, self.replicates, self.seed, self.alpha
        ));
        out.push_str(&format!(
            "  expected power       {:.4}\n",
            self.expected_power
        ));
        out.push_str(&format!(
            "  detection frequency  {:.4}\n",
            self.detection_frequency
        ));
        out.push_str(&format!(
            "  errored replicates   {}\n",
            self.errored_replicates
        ));
        out
    }
}

impl WeightsReport {
    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "sample weights: {} (scheme = {})\n",
            self.input, self.scheme
        ));
        out.push_str(&format!(
            "  {:<10} {:>8} {:>12}\n",
            "(a, y)", "count", "weight"
        ));
        for cell in &self.weights {
            out.push_str(&format!(
                "  (a={}, y={}) {:>8} {:>12.6}\n",
                cell.a, cell.y, cell.count, cell.w
            ));
        }
        match &self.output {
            Some(path) => out.push_str(&format!(
                "  wrote {} weighted rows to {}\n",
                self.rows, path
            )),
            None => out.push_str(&format!("  {} rows (weighted CSV on stdout)\n", self.rows)),
        }
        out
    }
}
