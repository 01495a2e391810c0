//! Memoryless channels and Gallager's channel function.
//!
//! `E0(ρ, Q) = −log Σ_y (Σ_x Q(x) W(y|x)^{1/(1+ρ)})^{1+ρ}` for discrete
//! channels; for the binary-input AWGN channel the outer sum is an integral
//! evaluated by Gauss–Hermite quadrature. The BI-AWGN channel is normalized to
//! `Es = 1`, inputs `x ∈ {+1, −1}` (bit 0 ↦ +1) and real noise of variance
//! `N0/2 = 1/(2·Es/N0)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::numeric::{
    gauss_hermite, golden_max, log_sum_exp, scan_max, upper_concave_envelope, Chebyshev, ConcaveEnvelope, Maximum,
    GOLDEN_TOL,
};

/// Row sums of a transition matrix must be one within this tolerance.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Accept the Gauss–Hermite value once two successive node counts agree this well.
pub const QUADRATURE_TOL: f64 = 1e-10;
const GH_START: usize = 64;
const GH_CAP: usize = 4096;
/// Largest ρ accepted by the raw channel functions (diagnostics only).
pub const RHO_DIAGNOSTIC_MAX: f64 = 10.0;
/// Number of samples of the concave hull construction.
pub const HULL_GRID: usize = 2001;

/// Discrete memoryless channel given by its row-stochastic transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    rows: Vec<Vec<f64>>,
    log_rows: Vec<Vec<f64>>,
}

impl Dmc {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidChannel("need at least two inputs".into()));
        }
        let width = rows[0].len();
        if width < 2 {
            return Err(Error::InvalidChannel("need at least two outputs".into()));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if row.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has a negative or non-finite entry"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidChannel(format!("row {x} sums to {s}")));
            }
        }
        let log_rows = rows.iter().map(|r| r.iter().map(|w| w.ln()).collect()).collect();
        Ok(Dmc { rows, log_rows })
    }

    /// Binary symmetric channel with crossover `delta`.
    pub fn bsc(delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(domain("delta", delta, "0 <= delta <= 1"));
        }
        Dmc::new(vec![vec![1.0 - delta, delta], vec![delta, 1.0 - delta]])
    }

    /// Z channel: input 0 is noiseless, input 1 flips to 0 with probability `eps`.
    pub fn z_channel(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(domain("eps", eps, "0 <= eps <= 1"));
        }
        Dmc::new(vec![vec![1.0, 0.0], vec![eps, 1.0 - eps]])
    }

    /// BI-AWGN channel followed by a `levels`-cell output quantizer.
    ///
    /// Cell edges are companded with point density proportional to
    /// `(f(y) π(y) (1 − π(y)))^{1/3}`, where `f` is the ρ = 1 integrand of E0
    /// and `π` the matching tilted posterior of input +1.
    pub fn quantized_bi_awgn(es_n0: f64, levels: usize) -> Result<Self> {
        if !(es_n0 > 0.0 && es_n0.is_finite()) {
            return Err(domain("es_n0", es_n0, "es_n0 > 0"));
        }
        if levels < 2 {
            return Err(Error::InvalidChannel("need at least two quantizer levels".into()));
        }
        let var = 0.5 / es_n0;
        let sd = var.sqrt();
        let span = 1.0 + 12.0 * sd;
        let grid = 400 * levels;
        let ys: Vec<f64> = (0..=grid)
            .map(|j| -span + 2.0 * span * j as f64 / grid as f64)
            .collect();
        let density = |y: f64| {
            let lf = 2.0
                * log_sum_exp([
                    -(y - 1.0) * (y - 1.0) / (4.0 * var),
                    -(y + 1.0) * (y + 1.0) / (4.0 * var),
                ]);
            let l = y / var;
            // log π(1 − π) for π = 1/(1 + e^{−l})
            let lpi = -l.abs() - 2.0 * (1.0 + (-l.abs()).exp()).ln();
            ((lf + lpi) / 3.0).exp()
        };
        let mut cum = vec![0.0; ys.len()];
        let mut prev = density(ys[0]);
        for j in 1..ys.len() {
            let d = density(ys[j]);
            cum[j] = cum[j - 1] + 0.5 * (prev + d);
            prev = d;
        }
        let total = cum[grid];
        let edges: Vec<f64> = (1..levels)
            .map(|i| {
                let target = total * i as f64 / levels as f64;
                let j = cum.partition_point(|c| *c < target).clamp(1, grid);
                let frac = (target - cum[j - 1]) / (cum[j] - cum[j - 1]);
                ys[j - 1] + frac * (ys[j] - ys[j - 1])
            })
            .collect();
        let row = |mean: f64| -> Vec<f64> {
            let cdf = |y: f64| 0.5 * statrs::function::erf::erfc(-(y - mean) / (sd * std::f64::consts::SQRT_2));
            let mut out = Vec::with_capacity(levels);
            let mut prev = 0.0;
            for &e in &edges {
                let c = cdf(e);
                out.push(c - prev);
                prev = c;
            }
            out.push(1.0 - prev);
            let s: f64 = out.iter().sum();
            out.iter_mut().for_each(|w| *w /= s);
            out
        };
        Dmc::new(vec![row(1.0), row(-1.0)])
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Gallager symmetry: the outputs split into groups in which every
    /// column is a permutation of every other and every row restricted to
    /// the group is a permutation of every other row.
    pub fn is_symmetric(&self) -> bool {
        let sorted = |mut v: Vec<f64>| {
            v.sort_by(f64::total_cmp);
            v
        };
        let columns: Vec<Vec<f64>> = (0..self.outputs())
            .map(|y| sorted(self.rows.iter().map(|r| r[y]).collect()))
            .collect();
        let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
        for (y, col) in columns.into_iter().enumerate() {
            match groups.iter_mut().find(|g| g.0 == col) {
                Some(g) => g.1.push(y),
                None => groups.push((col, vec![y])),
            }
        }
        groups.iter().all(|(_, ys)| {
            let first = sorted(ys.iter().map(|&y| self.rows[0][y]).collect());
            self.rows[1..]
                .iter()
                .all(|r| sorted(ys.iter().map(|&y| r[y]).collect()) == first)
        })
    }
}

/// A memoryless channel.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Dmc(Dmc),
    /// Binary-input AWGN with antipodal inputs; linear `Es/N0`.
    BiAwgn {
        es_n0: f64,
    },
}

impl ChannelSpec {
    pub fn bi_awgn(es_n0: f64) -> Result<Self> {
        if !(es_n0 > 0.0 && es_n0.is_finite()) {
            return Err(domain("es_n0", es_n0, "es_n0 > 0"));
        }
        Ok(ChannelSpec::BiAwgn { es_n0 })
    }

    pub fn dmc(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(ChannelSpec::Dmc(Dmc::new(rows)?))
    }

    pub fn inputs(&self) -> usize {
        match self {
            ChannelSpec::Dmc(d) => d.inputs(),
            ChannelSpec::BiAwgn { .. } => 2,
        }
    }

    /// True when the uniform input maximizes `E0(ρ, Q)` for every ρ.
    pub fn is_symmetric(&self) -> bool {
        match self {
            ChannelSpec::Dmc(d) => d.is_symmetric(),
            ChannelSpec::BiAwgn { .. } => true,
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Dmc(d) => write!(f, "DMC({}x{})", d.inputs(), d.outputs()),
            ChannelSpec::BiAwgn { es_n0 } => write!(f, "BI-AWGN(Es/N0={es_n0})"),
        }
    }
}

/// Channel input distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution(Vec<f64>);

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution("input probabilities must be >= 0".into()));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("input probabilities sum to {s}")));
        }
        Ok(InputDistribution(probs))
    }

    pub fn uniform(n: usize) -> Self {
        InputDistribution(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=RHO_DIAGNOSTIC_MAX).contains(&rho) {
        return Err(domain("rho", rho, "0 <= rho <= 10"));
    }
    Ok(())
}

fn check_input(ch: &ChannelSpec, q: &InputDistribution) -> Result<()> {
    if q.0.len() != ch.inputs() {
        return Err(Error::InvalidDistribution(format!(
            "input distribution has {} entries, channel has {} inputs",
            q.0.len(),
            ch.inputs()
        )));
    }
    Ok(())
}

/// Gallager's channel function `E0(ρ, Q)` in nats per channel use.
pub fn e0(ch: &ChannelSpec, q: &InputDistribution, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    check_input(ch, q)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    match ch {
        ChannelSpec::Dmc(d) => Ok(dmc_e0(d, &q.0, rho)),
        ChannelSpec::BiAwgn { es_n0 } => bi_awgn_e0(*es_n0, &q.0, rho).map(|r| r.0),
    }
}

fn dmc_e0(d: &Dmc, q: &[f64], rho: f64) -> f64 {
    let a = 1.0 / (1.0 + rho);
    let terms = (0..d.outputs()).map(|y| {
        let inner = log_sum_exp(
            q.iter()
                .zip(&d.log_rows)
                .filter(|(qx, _)| **qx > 0.0)
                .map(|(qx, lr)| qx.ln() + a * lr[y]),
        );
        (1.0 + rho) * inner
    });
    -log_sum_exp(terms)
}

/// `∫ (Σ_x Q(x) W(y|x)^a)^{1+ρ} dy` for the BI-AWGN channel with `n` nodes.
///
/// The integrand is divided by the equal-weight output mixture
/// `½(W(y|+1) + W(y|−1))`, which leaves a bounded smooth ratio, and the
/// mixture is integrated component-wise by Gauss–Hermite.
fn bi_awgn_integral(es_n0: f64, q: &[f64], rho: f64, n: usize) -> f64 {
    let var = 0.5 / es_n0;
    let sd = var.sqrt();
    let a = 1.0 / (1.0 + rho);
    let (lq0, lq1) = (q[0].ln(), q[1].ln());
    let rule = gauss_hermite(n);
    let ratio = |y: f64| {
        let lp = -(y - 1.0) * (y - 1.0) / (2.0 * var);
        let lm = -(y + 1.0) * (y + 1.0) / (2.0 * var);
        let lf = (1.0 + rho) * log_sum_exp([lq0 + a * lp, lq1 + a * lm]);
        let lmix = log_sum_exp([lp, lm]) - std::f64::consts::LN_2;
        (lf - lmix).exp()
    };
    0.5 * rule.gaussian_expectation(1.0, sd, ratio) + 0.5 * rule.gaussian_expectation(-1.0, sd, ratio)
}

/// Returns `(E0, accepted node count)`.
fn bi_awgn_e0(es_n0: f64, q: &[f64], rho: f64) -> Result<(f64, usize)> {
    let mut n = GH_START;
    let mut prev = -bi_awgn_integral(es_n0, q, rho, n).ln();
    while n < GH_CAP {
        n *= 2;
        let next = -bi_awgn_integral(es_n0, q, rho, n).ln();
        if (next - prev).abs() < QUADRATURE_TOL {
            return Ok((next, n));
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "BI-AWGN E0 at Es/N0={es_n0}, rho={rho} did not settle with {GH_CAP} nodes"
    )))
}

/// Node count at which the BI-AWGN quadrature was accepted.
pub fn bi_awgn_node_count(es_n0: f64, rho: f64) -> Result<usize> {
    bi_awgn_e0(es_n0, &[0.5, 0.5], rho).map(|r| r.1)
}

/// Raw BI-AWGN E0 with a fixed node count (for stability checks).
pub fn bi_awgn_e0_fixed(es_n0: f64, q: &InputDistribution, rho: f64, nodes: usize) -> f64 {
    -bi_awgn_integral(es_n0, &q.0, rho, nodes).ln()
}

/// Mutual information `I(Q)` in nats, which equals `∂E0/∂ρ` at ρ = 0.
pub fn mutual_information(ch: &ChannelSpec, q: &InputDistribution) -> Result<f64> {
    check_input(ch, q)?;
    match ch {
        ChannelSpec::Dmc(d) => {
            let py: Vec<f64> = (0..d.outputs())
                .map(|y| q.0.iter().zip(&d.rows).map(|(qx, r)| qx * r[y]).sum())
                .collect();
            let mut info = 0.0;
            for (qx, r) in q.0.iter().zip(&d.rows) {
                for (y, w) in r.iter().enumerate() {
                    if *qx > 0.0 && *w > 0.0 {
                        info += qx * w * (w / py[y]).ln();
                    }
                }
            }
            Ok(info)
        }
        ChannelSpec::BiAwgn { es_n0 } => {
            let var = 0.5 / es_n0;
            let sd = var.sqrt();
            let (q0, q1) = (q.0[0], q.0[1]);
            let rule = gauss_hermite(256);
            // log W(y|x) − log Σ_x' Q(x') W(y|x')
            let info_from = |x: f64| {
                rule.gaussian_expectation(x, sd, |y| {
                    let lp = -(y - 1.0) * (y - 1.0) / (2.0 * var);
                    let lm = -(y + 1.0) * (y + 1.0) / (2.0 * var);
                    let own = if x > 0.0 { lp } else { lm };
                    own - log_sum_exp([q0.ln() + lp, q1.ln() + lm])
                })
            };
            let mut info = 0.0;
            if q0 > 0.0 {
                info += q0 * info_from(1.0);
            }
            if q1 > 0.0 {
                info += q1 * info_from(-1.0);
            }
            Ok(info)
        }
    }
}

/// Random-coding exponent `Er(R, Q) = max_{ρ∈[0,1]} {E0(ρ, Q) − ρR}`,
/// maximized by golden-section search.
pub fn random_coding_exponent(ch: &ChannelSpec, q: &InputDistribution, rate: f64) -> Result<f64> {
    if !(rate >= 0.0) {
        return Err(domain("rate", rate, "rate >= 0"));
    }
    check_input(ch, q)?;
    let mut failure = None;
    let m = golden_max(
        |rho| match e0(ch, q, rho) {
            Ok(v) => v - rho * rate,
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        },
        0.0,
        1.0,
        GOLDEN_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(m.value.max(0.0)),
    }
}

/// `max_Q E0(ρ, Q)` and the maximizing input distribution.
///
/// Symmetric channels use the uniform input. Other DMCs run projected
/// gradient ascent over the probability simplex from the uniform start.
pub fn e0_max(ch: &ChannelSpec, rho: f64) -> Result<(f64, InputDistribution)> {
    check_rho(rho)?;
    let uniform = InputDistribution::uniform(ch.inputs());
    if ch.is_symmetric() || rho == 0.0 {
        return Ok((e0(ch, &uniform, rho)?, uniform));
    }
    match ch {
        ChannelSpec::Dmc(d) => Ok(dmc_input_ascent(d, rho)),
        ChannelSpec::BiAwgn { .. } => unreachable!("BI-AWGN is symmetric"),
    }
}

/// Minimizes `F(Q) = Σ_y (Σ_x Q(x) W^a)^{1+ρ}` (convex in Q) over the simplex.
fn dmc_input_ascent(d: &Dmc, rho: f64) -> (f64, InputDistribution) {
    let a = 1.0 / (1.0 + rho);
    let wa: Vec<Vec<f64>> = d.rows.iter().map(|r| r.iter().map(|w| w.powf(a)).collect()).collect();
    let objective = |q: &[f64]| -> f64 {
        (0..d.outputs())
            .map(|y| q.iter().zip(&wa).map(|(qx, r)| qx * r[y]).sum::<f64>().powf(1.0 + rho))
            .sum()
    };
    let gradient = |q: &[f64]| -> Vec<f64> {
        let inner: Vec<f64> = (0..d.outputs())
            .map(|y| q.iter().zip(&wa).map(|(qx, r)| qx * r[y]).sum::<f64>().powf(rho))
            .collect();
        wa.iter()
            .map(|r| (1.0 + rho) * r.iter().zip(&inner).map(|(w, s)| w * s).sum::<f64>())
            .collect()
    };
    let mut q = vec![1.0 / d.inputs() as f64; d.inputs()];
    let mut f = objective(&q);
    let mut step = 1.0;
    for _ in 0..10_000 {
        let g = gradient(&q);
        let mut improved = false;
        while step > 1e-16 {
            let trial: Vec<f64> = q.iter().zip(&g).map(|(qx, gx)| qx - step * gx).collect();
            let trial = project_simplex(&trial);
            let ft = objective(&trial);
            if ft < f {
                let gain = (f.ln() - ft.ln()).abs();
                q = trial;
                f = ft;
                improved = gain > 1e-15;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (-f.ln(), InputDistribution(q))
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// A channel function `ρ ↦ E0(ρ)` on `[0, 1]`.
pub trait GallagerCurve: Sync {
    fn e0(&self, rho: f64) -> f64;

    /// `Er(R) = max_{ρ∈[0,1]} {E0(ρ) − ρR}` with its maximizer. A coarse scan
    /// precedes the golden-section refinement so that non-concave curves are
    /// handled as well as concave ones.
    fn random_coding(&self, rate: f64) -> Maximum {
        let mut m = scan_max(|rho| self.e0(rho) - rho * rate, 0.0, 1.0, 33, GOLDEN_TOL);
        if m.value < 0.0 {
            m.value = 0.0;
            m.arg = 0.0;
        }
        m
    }
}

impl<F: Fn(f64) -> f64 + Sync> GallagerCurve for F {
    fn e0(&self, rho: f64) -> f64 {
        self(rho)
    }
}

/// Which input distribution an [`E0Curve`] uses.
#[derive(Debug, Clone, PartialEq)]
pub enum InputPolicy {
    Fixed(InputDistribution),
    /// `E0(ρ) = max_Q E0(ρ, Q)`.
    Optimized,
}

enum CurveRepr {
    Chebyshev(Chebyshev),
    Direct(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// `E0(ρ)` of a channel on `[0, 1]`, prepared for repeated evaluation.
///
/// The exact function (quadrature or input optimization per call) is fitted
/// by a Chebyshev interpolant whose trailing coefficients are below 1e-13;
/// when the fit does not converge (a kink from a change of the optimal input
/// support) the curve falls back to exact evaluation on every call.
pub struct E0Curve {
    channel: ChannelSpec,
    policy: InputPolicy,
    repr: CurveRepr,
}

impl fmt::Debug for E0Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("E0Curve")
            .field("channel", &self.channel)
            .field("policy", &self.policy)
            .field(
                "repr",
                &match &self.repr {
                    CurveRepr::Chebyshev(c) => format!("chebyshev(deg {})", c.degree()),
                    CurveRepr::Direct(_) => "direct".to_string(),
                },
            )
            .finish()
    }
}

impl E0Curve {
    pub fn new(channel: &ChannelSpec, policy: InputPolicy) -> Result<Self> {
        if let InputPolicy::Fixed(q) = &policy {
            check_input(channel, q)?;
        }
        let exact = exact_fn(channel, &policy);
        // surface quadrature failures now rather than inside optimizers
        for rho in [0.25, 0.5, 1.0] {
            exact(rho)?;
        }
        let sampler = smooth_sampler(channel, &policy)?;
        let fit = Chebyshev::fit_adaptive(|rho| sampler(rho).unwrap_or(f64::NAN), 0.0, 1.0, 1e-13, 256)
            .filter(|c| (0..=20).all(|j| c.eval(j as f64 / 20.0).is_finite()));
        let repr = match fit {
            Some(c) => CurveRepr::Chebyshev(c),
            None => {
                let ch = channel.clone();
                let pol = policy.clone();
                CurveRepr::Direct(Arc::new(move |rho| exact_fn(&ch, &pol)(rho).unwrap_or(f64::NAN)))
            }
        };
        Ok(E0Curve {
            channel: channel.clone(),
            policy,
            repr,
        })
    }

    /// Curve of `max_Q E0(ρ, Q)`.
    pub fn optimized(channel: &ChannelSpec) -> Result<Self> {
        E0Curve::new(channel, InputPolicy::Optimized)
    }

    /// Curve at the uniform input.
    pub fn uniform(channel: &ChannelSpec) -> Result<Self> {
        E0Curve::new(
            channel,
            InputPolicy::Fixed(InputDistribution::uniform(channel.inputs())),
        )
    }

    pub fn channel(&self) -> &ChannelSpec {
        &self.channel
    }

    pub fn policy(&self) -> &InputPolicy {
        &self.policy
    }

    pub fn is_interpolated(&self) -> bool {
        matches!(self.repr, CurveRepr::Chebyshev(_))
    }

    /// Upper concave envelope of this curve sampled on [`HULL_GRID`] points.
    pub fn concave_hull(&self) -> ConcaveEnvelope {
        hull_of(self)
    }
}

impl GallagerCurve for E0Curve {
    fn e0(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let rho = rho.min(1.0);
        match &self.repr {
            CurveRepr::Chebyshev(c) => c.eval(rho),
            CurveRepr::Direct(f) => f(rho),
        }
    }
}

/// Exact E0 for the fit. Adaptive quadrature picks its node count per ρ, and
/// the resulting jumps of order 1e-12 would stall the Chebyshev tail test, so
/// BI-AWGN curves are sampled with one node count large enough for all ρ.
fn smooth_sampler(channel: &ChannelSpec, policy: &InputPolicy) -> Result<Box<dyn Fn(f64) -> Result<f64>>> {
    if let (ChannelSpec::BiAwgn { es_n0 }, InputPolicy::Fixed(q)) = (channel, policy) {
        let mut nodes = 0;
        for rho in [0.05, 0.25, 0.5, 1.0] {
            nodes = nodes.max(bi_awgn_node_count(*es_n0, rho)?);
        }
        let (es_n0, q) = (*es_n0, q.clone());
        let nodes = 2 * nodes;
        return Ok(Box::new(move |rho| {
            Ok(if rho == 0.0 {
                0.0
            } else {
                bi_awgn_e0_fixed(es_n0, &q, rho, nodes)
            })
        }));
    }
    Ok(Box::new(exact_fn(channel, policy)))
}

fn exact_fn(channel: &ChannelSpec, policy: &InputPolicy) -> impl Fn(f64) -> Result<f64> {
    let channel = channel.clone();
    let policy = policy.clone();
    move |rho| match &policy {
        InputPolicy::Fixed(q) => e0(&channel, q, rho),
        InputPolicy::Optimized => e0_max(&channel, rho).map(|r| r.0),
    }
}

/// Concave envelope of any curve on `[0, 1]`, sampled at [`HULL_GRID`] points.
pub fn hull_of<C: GallagerCurve + ?Sized>(curve: &C) -> ConcaveEnvelope {
    let xs: Vec<f64> = (0..HULL_GRID).map(|j| j as f64 / (HULL_GRID - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&r| curve.e0(r)).collect();
    upper_concave_envelope(&xs, &ys)
}

/// Pointwise concave hull `Ē0(ρ)` of `max_Q E0(ρ, Q)`.
pub fn e0_concave_hull(ch: &ChannelSpec, rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(domain("rho", rho, "0 <= rho <= 1"));
    }
    Ok(E0Curve::optimized(ch)?.concave_hull().eval(rho))
}
