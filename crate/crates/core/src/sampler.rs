//! Monte Carlo estimators that realise a signed mixture of free operations.
//!
//! A shot flips a coin with bias `p± = λ±/γ`, applies the chosen channel to
//! the input, measures one observable per output copy and stores each outcome
//! scaled by `±γ`. The sample average is an unbiased estimate of the
//! expectation in the virtual output `λ₊Λ₊(ρ) − λ₋Λ₋(ρ)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VqrdError};
use crate::qcore::{linalg, ChoiOperator, DensityMatrix, HermitianOperator};

/// Shots per parallel batch. Each batch draws from its own RNG stream.
const BATCH: usize = 4096;

/// Tolerance used when checking that supplied channels are CPTP (or CPTNI).
/// Channels reconstructed from solver output carry errors around 1e-8.
const CHANNEL_TOL: f64 = 1e-7;

/// Signed mixture `λ₊Λ₊ − λ₋Λ₋` of two channels with `λ₊ − λ₋ = 1`.
#[derive(Clone, Debug)]
pub struct QuasiDecomposition {
    lambda_plus: f64,
    lambda_minus: f64,
    channel_plus: ChoiOperator,
    channel_minus: ChoiOperator,
    m: usize,
}

impl QuasiDecomposition {
    pub const BALANCE_TOL: f64 = 1e-9;

    pub fn new(lambda_plus: f64, lambda_minus: f64, channel_plus: ChoiOperator, channel_minus: ChoiOperator, m: usize) -> Result<Self> {
        check_coefficients(lambda_plus, lambda_minus, m)?;
        channel_plus.check_same_shape(&channel_minus)?;
        for (name, ch) in [("plus", &channel_plus), ("minus", &channel_minus)] {
            if !ch.is_cp(CHANNEL_TOL) || !ch.is_tp(CHANNEL_TOL) {
                return Err(VqrdError::invalid(format!("{name} channel is not CPTP")));
            }
        }
        Ok(Self { lambda_plus, lambda_minus, channel_plus, channel_minus, m })
    }

    /// A single channel seen as a degenerate quasi-mixture with `λ₋ = 0`.
    pub fn plain(channel: ChoiOperator, m: usize) -> Result<Self> {
        Self::new(1.0, 0.0, channel.clone(), channel, m)
    }

    /// Groups signed terms `Σ cᵢ Λᵢ` into one positive and one negative part.
    ///
    /// `λ₊` is the sum of the positive coefficients and `Λ₊` the matching
    /// convex mixture; likewise for the negative side. The total `γ` equals
    /// `Σ |cᵢ|`.
    pub fn from_terms(terms: &[(f64, ChoiOperator)], m: usize) -> Result<Self> {
        let first = terms.first().ok_or_else(|| VqrdError::invalid("no terms"))?;
        let mut plus = first.1.scale(0.0);
        let mut minus = first.1.scale(0.0);
        let (mut lp, mut lm) = (0.0, 0.0);
        for (c, ch) in terms {
            if !c.is_finite() {
                return Err(VqrdError::invalid("non-finite coefficient"));
            }
            if *c >= 0.0 {
                plus = plus.add(&ch.scale(*c))?;
                lp += c;
            } else {
                minus = minus.add(&ch.scale(-c))?;
                lm -= c;
            }
        }
        // An empty side gets an arbitrary channel; it is never sampled.
        plus = if lp > 0.0 { plus.scale(1.0 / lp) } else { first.1.clone() };
        minus = if lm > 0.0 { minus.scale(1.0 / lm) } else { first.1.clone() };
        Self::new(lp, lm, plus, minus, m)
    }

    pub fn lambda_plus(&self) -> f64 {
        self.lambda_plus
    }

    pub fn lambda_minus(&self) -> f64 {
        self.lambda_minus
    }

    pub fn gamma(&self) -> f64 {
        self.lambda_plus + self.lambda_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.lambda_plus / self.gamma()
    }

    pub fn p_minus(&self) -> f64 {
        self.lambda_minus / self.gamma()
    }

    pub fn channel_plus(&self) -> &ChoiOperator {
        &self.channel_plus
    }

    pub fn channel_minus(&self) -> &ChoiOperator {
        &self.channel_minus
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim_in(&self) -> usize {
        self.channel_plus.dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.channel_plus.dim_out()
    }

    /// The virtual output `λ₊Λ₊(ρ) − λ₋Λ₋(ρ)`.
    pub fn output(&self, rho: &DensityMatrix) -> Result<HermitianOperator> {
        let p = self.channel_plus.apply_operator(rho.operator())?;
        let n = self.channel_minus.apply_operator(rho.operator())?;
        Ok(p.scale(self.lambda_plus).sub(&n.scale(self.lambda_minus)))
    }

    /// Exact expectation of [`estimate_expectation`]: the average over copies
    /// of `Tr(M η̃ⱼ)` where `η̃ⱼ` is the j-th single-copy marginal of the
    /// virtual output.
    pub fn analytic_mean(&self, rho: &DensityMatrix, obs: &HermitianOperator) -> Result<f64> {
        let plus = self.channel_plus.apply_operator(rho.operator())?;
        let minus = self.channel_minus.apply_operator(rho.operator())?;
        let mp = mean_marginal_overlap(&plus, obs, self.m)?;
        let mm = mean_marginal_overlap(&minus, obs, self.m)?;
        Ok(self.lambda_plus * mp - self.lambda_minus * mm)
    }
}

/// Signed mixture of trace non-increasing maps, realised with postselection.
///
/// With `postselect` set the virtual output is
/// `λ₊Λ₊(ρ)/Tr Λ₊(ρ) − λ₋Λ₋(ρ)/Tr Λ₋(ρ)` and failed runs are repeated.
/// Without it a failed run stores the value 0, so the estimator targets the
/// unnormalised `λ₊Λ₊(ρ) − λ₋Λ₋(ρ)`.
#[derive(Clone, Debug)]
pub struct ProbabilisticDecomposition {
    lambda_plus: f64,
    lambda_minus: f64,
    channel_plus: ChoiOperator,
    channel_minus: ChoiOperator,
    m: usize,
    postselect: bool,
}

impl ProbabilisticDecomposition {
    pub fn new(
        lambda_plus: f64,
        lambda_minus: f64,
        channel_plus: ChoiOperator,
        channel_minus: ChoiOperator,
        m: usize,
        postselect: bool,
    ) -> Result<Self> {
        check_coefficients(lambda_plus, lambda_minus, m)?;
        channel_plus.check_same_shape(&channel_minus)?;
        for (name, ch) in [("plus", &channel_plus), ("minus", &channel_minus)] {
            if !ch.is_cp(CHANNEL_TOL) {
                return Err(VqrdError::invalid(format!("{name} subchannel is not completely positive")));
            }
            let t = linalg::partial_trace(ch.matrix(), &[ch.dim_in(), ch.dim_out()], &[0])?;
            if linalg::max_eigenvalue(&t) > 1.0 + CHANNEL_TOL {
                return Err(VqrdError::invalid(format!("{name} subchannel increases trace")));
            }
        }
        Ok(Self { lambda_plus, lambda_minus, channel_plus, channel_minus, m, postselect })
    }

    /// Every channel is a subchannel that always succeeds.
    pub fn from_quasi(d: &QuasiDecomposition, postselect: bool) -> Self {
        Self {
            lambda_plus: d.lambda_plus,
            lambda_minus: d.lambda_minus,
            channel_plus: d.channel_plus.clone(),
            channel_minus: d.channel_minus.clone(),
            m: d.m,
            postselect,
        }
    }

    pub fn lambda_plus(&self) -> f64 {
        self.lambda_plus
    }

    pub fn lambda_minus(&self) -> f64 {
        self.lambda_minus
    }

    pub fn gamma(&self) -> f64 {
        self.lambda_plus + self.lambda_minus
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn postselect(&self) -> bool {
        self.postselect
    }

    /// `(Tr Λ₊(ρ), Tr Λ₋(ρ))`.
    pub fn success_probabilities(&self, rho: &DensityMatrix) -> Result<(f64, f64)> {
        let sp = self.channel_plus.apply_operator(rho.operator())?.trace().clamp(0.0, 1.0);
        let sm = self.channel_minus.apply_operator(rho.operator())?.trace().clamp(0.0, 1.0);
        Ok((sp, sm))
    }

    /// Average success probability of a single attempt, `(λ₊s₊ + λ₋s₋)/γ`.
    pub fn average_success(&self, rho: &DensityMatrix) -> Result<f64> {
        let (sp, sm) = self.success_probabilities(rho)?;
        Ok((self.lambda_plus * sp + self.lambda_minus * sm) / self.gamma())
    }

    pub fn analytic_mean(&self, rho: &DensityMatrix, obs: &HermitianOperator) -> Result<f64> {
        let plus = self.channel_plus.apply_operator(rho.operator())?;
        let minus = self.channel_minus.apply_operator(rho.operator())?;
        let mut mp = mean_marginal_overlap(&plus, obs, self.m)?;
        let mut mm = mean_marginal_overlap(&minus, obs, self.m)?;
        if self.postselect {
            let (sp, sm) = self.success_probabilities(rho)?;
            mp = if self.lambda_plus > 0.0 { mp / sp } else { 0.0 };
            mm = if self.lambda_minus > 0.0 { mm / sm } else { 0.0 };
        }
        Ok(self.lambda_plus * mp - self.lambda_minus * mm)
    }
}

fn check_coefficients(lp: f64, lm: f64, m: usize) -> Result<()> {
    if !(lp.is_finite() && lm.is_finite()) || lp < 0.0 || lm < 0.0 {
        return Err(VqrdError::invalid(format!("coefficients must be finite and nonnegative, got {lp}, {lm}")));
    }
    if (lp - lm - 1.0).abs() > QuasiDecomposition::BALANCE_TOL {
        return Err(VqrdError::invalid(format!("λ₊ − λ₋ = {} must equal 1", lp - lm)));
    }
    if m == 0 {
        return Err(VqrdError::invalid("m must be at least 1"));
    }
    Ok(())
}

/// Average over the m single-copy marginals of `Tr(M xⱼ)`.
fn mean_marginal_overlap(x: &HermitianOperator, obs: &HermitianOperator, m: usize) -> Result<f64> {
    let marg = marginals(x, obs.dim(), m)?;
    Ok(marg.iter().map(|r| r.overlap(obs)).sum::<f64>() / m as f64)
}

fn marginals(x: &HermitianOperator, d: usize, m: usize) -> Result<Vec<HermitianOperator>> {
    if d.checked_pow(m as u32) != Some(x.dim()) {
        return Err(VqrdError::dims(format!("output of dimension {} is not {m} copies of a {d}-level system", x.dim())));
    }
    let dims = vec![d; m];
    (0..m).map(|j| x.partial_trace(&dims, &[j])).collect()
}

/// Result of a Monte Carlo run.
///
/// `estimate` is the average of the stored values, `empirical_std` their
/// sample standard deviation, `n_samples` the number of accepted shots and
/// `samples_consumed` the number of times the input was used, counting
/// restarts after failed postselection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub estimate: f64,
    #[serde(rename = "n")]
    pub n_samples: u64,
    #[serde(rename = "std")]
    pub empirical_std: f64,
    pub seed: u64,
    #[serde(rename = "consumed")]
    pub samples_consumed: u64,
}

impl EstimatorReport {
    /// Standard error of the estimate, counting each stored value once.
    pub fn standard_error(&self, m: usize) -> f64 {
        self.empirical_std / ((self.n_samples as f64) * m as f64).sqrt()
    }
}

/// Per-copy outcome distributions, one per sign, in the eigenbasis of `M`.
struct ShotModel {
    gamma: f64,
    p_plus: f64,
    eigenvalues: Vec<f64>,
    // born[s][j]: distribution for copy j given sign s (0 plus, 1 minus)
    born: [Vec<WeightedIndex<f64>>; 2],
    // Success probability per sign, and whether failures restart the shot.
    success: [f64; 2],
    restart: bool,
}

impl ShotModel {
    fn new(
        lp: f64,
        lm: f64,
        outputs: [HermitianOperator; 2],
        obs: &HermitianOperator,
        m: usize,
        success: [f64; 2],
        restart: bool,
    ) -> Result<Self> {
        check_observable(obs)?;
        let (eigenvalues, vecs) = linalg::herm_eig(obs.matrix());
        let mut born: [Vec<WeightedIndex<f64>>; 2] = [Vec::new(), Vec::new()];
        for (s, out) in outputs.iter().enumerate() {
            if [lp, lm][s] == 0.0 || success[s] == 0.0 {
                continue;
            }
            for r in marginals(out, obs.dim(), m)? {
                let w: Vec<f64> = (0..eigenvalues.len())
                    .map(|k| {
                        let v = vecs.column(k);
                        (v.adjoint() * r.matrix() * v)[(0, 0)].re.max(0.0)
                    })
                    .collect();
                let dist = WeightedIndex::new(&w).map_err(|e| VqrdError::invalid(format!("degenerate output state: {e}")))?;
                born[s].push(dist);
            }
        }
        Ok(Self { gamma: lp + lm, p_plus: lp / (lp + lm), eigenvalues, born, success, restart })
    }

    /// One shot: pushes m stored values and returns how many attempts it used.
    fn shot(&self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) -> u64 {
        let s = if rng.random::<f64>() < self.p_plus { 0 } else { 1 };
        let sign = if s == 0 { 1.0 } else { -1.0 };
        let mut attempts = 1;
        if self.success[s] < 1.0 {
            // A failed run is repeated with the same coin outcome; repeating
            // the coin flip too would reweight the two signs.
            while !rng.random_bool(self.success[s]) {
                if !self.restart {
                    out.extend(std::iter::repeat_n(0.0, self.born[s].len()));
                    return attempts;
                }
                attempts += 1;
            }
        }
        for dist in &self.born[s] {
            let k = dist.sample(rng);
            out.push(sign * self.gamma * self.eigenvalues[k]);
        }
        attempts
    }

    fn run(&self, n: usize, seed: u64) -> (Vec<f64>, u64) {
        let batches = n.div_ceil(BATCH);
        let parts: Vec<(Vec<f64>, u64)> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b as u64);
                let shots = BATCH.min(n - b * BATCH);
                let mut vals = Vec::with_capacity(shots * self.born[0].len().max(self.born[1].len()));
                let mut used = 0;
                for _ in 0..shots {
                    used += self.shot(&mut rng, &mut vals);
                }
                (vals, used)
            })
            .collect();
        let mut all = Vec::with_capacity(n);
        let mut consumed = 0;
        for (v, c) in parts {
            all.extend(v);
            consumed += c;
        }
        (all, consumed)
    }
}

fn check_observable(obs: &HermitianOperator) -> Result<()> {
    const TOL: f64 = 1e-9;
    if obs.min_eigenvalue() < -0.5 - TOL || obs.max_eigenvalue() > 0.5 + TOL {
        return Err(VqrdError::range(format!(
            "observable spectrum [{}, {}] exceeds [-1/2, 1/2]",
            obs.min_eigenvalue(),
            obs.max_eigenvalue()
        )));
    }
    Ok(())
}

fn summarize(values: &[f64], n: usize, seed: u64, consumed: u64) -> EstimatorReport {
    // Fixed-order sums keep the report reproducible bit for bit.
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0) } else { 0.0 };
    EstimatorReport { estimate: mean, n_samples: n as u64, empirical_std: var.sqrt(), seed, samples_consumed: consumed }
}

fn check_shots(n: usize) -> Result<()> {
    if n == 0 {
        return Err(VqrdError::invalid("at least one sample is required"));
    }
    Ok(())
}

fn quasi_model(d: &QuasiDecomposition, rho: &DensityMatrix, obs: &HermitianOperator) -> Result<ShotModel> {
    if rho.dim() != d.dim_in() {
        return Err(VqrdError::dims(format!("decomposition takes a {}-dimensional input, got {}", d.dim_in(), rho.dim())));
    }
    let outputs = [d.channel_plus.apply_operator(rho.operator())?, d.channel_minus.apply_operator(rho.operator())?];
    ShotModel::new(d.lambda_plus, d.lambda_minus, outputs, obs, d.m, [1.0, 1.0], true)
}

/// All stored values `±γ oⱼ` of an `n`-shot run, shot by shot.
pub fn sample_values(d: &QuasiDecomposition, rho: &DensityMatrix, obs: &HermitianOperator, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_shots(n)?;
    Ok(quasi_model(d, rho, obs)?.run(n, seed).0)
}

/// Estimates `Tr(M η̃)` with `n` shots of the quasi-mixture.
///
/// `M` must satisfy `−I/2 ⪯ M ⪯ I/2` and act on one copy of the output; with
/// `m` copies the `m` outcomes of a shot are all stored.
pub fn estimate_expectation(d: &QuasiDecomposition, rho: &DensityMatrix, obs: &HermitianOperator, n: usize, seed: u64) -> Result<EstimatorReport> {
    check_shots(n)?;
    let (values, consumed) = quasi_model(d, rho, obs)?.run(n, seed);
    Ok(summarize(&values, n, seed, consumed))
}

/// Postselected variant for trace non-increasing maps.
pub fn postselected_estimate(
    d: &ProbabilisticDecomposition,
    rho: &DensityMatrix,
    obs: &HermitianOperator,
    n: usize,
    seed: u64,
) -> Result<EstimatorReport> {
    check_shots(n)?;
    if rho.dim() != d.channel_plus.dim_in() {
        return Err(VqrdError::dims(format!("decomposition takes a {}-dimensional input, got {}", d.channel_plus.dim_in(), rho.dim())));
    }
    let (sp, sm) = d.success_probabilities(rho)?;
    for (lam, s, name) in [(d.lambda_plus, sp, "plus"), (d.lambda_minus, sm, "minus")] {
        if lam > 0.0 && s <= 0.0 {
            return Err(VqrdError::Infeasible(format!("{name} subchannel never succeeds on this input")));
        }
    }
    let raw = [d.channel_plus.apply_operator(rho.operator())?, d.channel_minus.apply_operator(rho.operator())?];
    let outputs = [
        if sp > 0.0 { raw[0].scale(1.0 / sp) } else { raw[0].clone() },
        if sm > 0.0 { raw[1].scale(1.0 / sm) } else { raw[1].clone() },
    ];
    let model = ShotModel::new(d.lambda_plus, d.lambda_minus, outputs, obs, d.m, [sp, sm], d.postselect)?;
    let (values, consumed) = model.run(n, seed);
    Ok(summarize(&values, n, seed, consumed))
}

/// Shots needed so that a two-sided Hoeffding bound gives accuracy `beta`
/// with probability `1 − delta`: `⌈γ²/(2β²m)·ln(2/δ)⌉`.
pub fn sample_complexity(gamma: f64, beta: f64, delta: f64, m: usize) -> Result<u64> {
    if !(beta > 0.0 && beta < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(VqrdError::range("beta and delta must lie in (0, 1)"));
    }
    if !(gamma.is_finite() && gamma >= 1.0) || m == 0 {
        return Err(VqrdError::invalid("gamma must be finite and at least 1, m at least 1"));
    }
    let n = gamma * gamma / (2.0 * beta * beta * m as f64) * (2.0 / delta).ln();
    // Guard against 184.00000000000003 style round-up.
    Ok((n - 1e-9).ceil().max(1.0) as u64)
}

/// Estimated outcome distribution of the virtual output in the computational
/// basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionEstimate {
    pub probabilities: Vec<f64>,
    pub counts_plus: Vec<u64>,
    pub counts_minus: Vec<u64>,
    pub n_plus: u64,
    pub n_minus: u64,
    pub seed: u64,
}

/// Measures each branch output in the computational basis, `N± = ⌈λ±γN⌉`
/// times, and combines the histograms as `λ₊n₊(j)/N₊ − λ₋n₋(j)/N₋`.
pub fn estimate_distribution(d: &QuasiDecomposition, rho: &DensityMatrix, n: usize, seed: u64) -> Result<DistributionEstimate> {
    check_shots(n)?;
    let g = d.gamma();
    let dout = d.dim_out();
    let alloc = |lam: f64| if lam > 0.0 { (lam * g * n as f64).ceil() as u64 } else { 0 };
    let (n_plus, n_minus) = (alloc(d.lambda_plus), alloc(d.lambda_minus));
    let mut counts = [vec![0u64; dout], vec![0u64; dout]];
    for (s, (ch, shots)) in [(&d.channel_plus, n_plus), (&d.channel_minus, n_minus)].into_iter().enumerate() {
        if shots == 0 {
            continue;
        }
        let out = ch.apply_operator(rho.operator())?;
        let w: Vec<f64> = (0..dout).map(|k| out.matrix()[(k, k)].re.max(0.0)).collect();
        let dist = WeightedIndex::new(&w).map_err(|e| VqrdError::invalid(format!("degenerate output state: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        for _ in 0..shots {
            counts[s][dist.sample(&mut rng)] += 1;
        }
    }
    let probabilities = (0..dout)
        .map(|j| {
            let mut p = 0.0;
            if n_plus > 0 {
                p += d.lambda_plus * counts[0][j] as f64 / n_plus as f64;
            }
            if n_minus > 0 {
                p -= d.lambda_minus * counts[1][j] as f64 / n_minus as f64;
            }
            p
        })
        .collect();
    let [counts_plus, counts_minus] = counts;
    Ok(DistributionEstimate { probabilities, counts_plus, counts_minus, n_plus, n_minus, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::objects;

    fn half_x() -> HermitianOperator {
        HermitianOperator::new(objects::pauli_x() * linalg::cr(0.5)).unwrap()
    }

    #[test]
    fn hoeffding_count() {
        assert_eq!(sample_complexity(1.0, 0.1, 0.05, 1).unwrap(), 185);
    }

    #[test]
    fn plain_channel_is_plain_monte_carlo() {
        let ch = objects::dephasing(0.3).unwrap();
        let d = QuasiDecomposition::plain(ch.clone(), 1).unwrap();
        let rho = objects::plus_state();
        let r = estimate_expectation(&d, &rho, &half_x(), 20000, 7).unwrap();
        let exact = ch.apply_operator(rho.operator()).unwrap().overlap(&half_x());
        assert!((r.estimate - exact).abs() < 3.0 * r.standard_error(1), "{r:?} vs {exact}");
        assert_eq!(r.samples_consumed, 20000);
    }

    #[test]
    fn deterministic_given_seed() {
        let d = QuasiDecomposition::plain(objects::depolarizing(2, 0.2).unwrap(), 1).unwrap();
        let rho = objects::t_state();
        let a = estimate_expectation(&d, &rho, &half_x(), 10000, 3).unwrap();
        let b = estimate_expectation(&d, &rho, &half_x(), 10000, 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn rejects_large_observable() {
        let d = QuasiDecomposition::plain(ChoiOperator::identity(2), 1).unwrap();
        let x = HermitianOperator::new(objects::pauli_x()).unwrap();
        assert!(estimate_expectation(&d, &objects::plus_state(), &x, 10, 0).is_err());
    }

    #[test]
    fn terms_grouping() {
        let id = ChoiOperator::identity(2);
        let z = ChoiOperator::from_unitary(&objects::pauli_z());
        let d = QuasiDecomposition::from_terms(&[(1.2, id.clone()), (0.3, id), (-0.5, z)], 1).unwrap();
        assert!((d.gamma() - 2.0).abs() < 1e-12);
        assert!((d.p_plus() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_rejected() {
        let id = ChoiOperator::identity(2);
        assert!(QuasiDecomposition::new(1.0, 0.5, id.clone(), id, 1).is_err());
    }
}
