//! Risk arithmetic at extreme exponents and Markov-averaging penalties.
//!
//! Probabilities with exponents far beyond double range are carried as
//! base-2 logarithms end to end; sums go through log-sum-exp with the
//! dominant term factored out. The module also houses the leak-rate
//! estimate, the fleet fatality baseline it is compared against, and the
//! `(m+1)·ε^{1/(m+1)}` cascade from repeated Markov splitting.

use crate::error::{Error, Result};
use crate::report::{format_f64, round_to_one_significant, MetricReport};
use crate::scalar::Scalar;
use std::cmp::Ordering;

/// A probability stored as its base-2 logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProb<T: Scalar>(T);

impl<T: Scalar> LogProb<T> {
    /// `2^{log2}`; `log2` may be far below the representable range of the
    /// linear value.
    pub fn from_log2(log2: T) -> Self {
        LogProb(log2)
    }

    /// From a positive linear probability.
    pub fn from_prob(p: T) -> Result<Self> {
        if p < T::zero() {
            return Err(Error::validation("probability must be nonnegative"));
        }
        Ok(LogProb(p.log2()))
    }

    pub fn log2(&self) -> T {
        self.0
    }

    pub fn log10(&self) -> T {
        self.0 * T::from_f64_c(std::f64::consts::LOG10_2)
    }

    /// Linear value; underflows to zero beyond double range.
    pub fn to_prob(&self) -> T {
        self.0.exp2()
    }

    /// Log-domain addition with the dominant term factored:
    /// `2^a + 2^b = 2^max (1 + 2^{-|a-b|})`.
    pub fn add(&self, other: &Self) -> Self {
        let (hi, lo) = if self.0 >= other.0 {
            (self.0, other.0)
        } else {
            (other.0, self.0)
        };
        if hi == T::neg_infinity() {
            return LogProb(T::neg_infinity());
        }
        let diff = lo - hi;
        // log2(1 + 2^diff) via ln_1p for accuracy near zero.
        let correction = (diff * T::LN_2()).exp().ln_1p() / T::LN_2();
        LogProb(hi + correction)
    }

    /// Log-domain multiplication.
    pub fn mul(&self, other: &Self) -> Self {
        LogProb(self.0 + other.0)
    }

    pub fn mul_linear(&self, factor: T) -> Self {
        LogProb(self.0 + factor.log2())
    }

    /// Decimal mantissa/exponent rendering: value = `mantissa × 10^exponent`
    /// with mantissa in `[1, 10)`.
    pub fn decimal_parts(&self) -> (T, i64) {
        let l10 = self.log10();
        let exp = l10.floor();
        let mantissa = T::from_f64_c(10.0).powf(l10 - exp);
        (mantissa, exp.to_f64().unwrap_or(f64::NAN) as i64)
    }
}

/// Log-domain ordering plus both renderings of each side.
///
/// Report entries: `ordering` (−1/0/+1), `log2_a`, `log2_b`, `log2_ratio`,
/// `log10_exponent_a`, `log10_exponent_b`.
pub fn log2_compare<T: Scalar>(a: LogProb<T>, b: LogProb<T>) -> (Ordering, MetricReport) {
    let ordering = a.log2().partial_cmp(&b.log2()).unwrap_or(Ordering::Equal);
    let mut r = MetricReport::new();
    r.push(
        "ordering",
        match ordering {
            Ordering::Less => -1.0,
            Ordering::Equal => 0.0,
            Ordering::Greater => 1.0,
        },
        "log2_compare: sign of log2(a) - log2(b)",
    );
    r.push(
        "log2_a",
        a.log2().to_f64_lossy(),
        "log2_compare: base-2 exponent of the first operand",
    );
    r.push(
        "log2_b",
        b.log2().to_f64_lossy(),
        "log2_compare: base-2 exponent of the second operand",
    );
    r.push(
        "log2_ratio",
        (a.log2() - b.log2()).to_f64_lossy(),
        "log2_compare: log2(a/b)",
    );
    r.push(
        "log10_exponent_a",
        a.decimal_parts().1 as f64,
        "log2_compare: decimal exponent of the first operand",
    );
    r.push(
        "log10_exponent_b",
        b.decimal_parts().1 as f64,
        "log2_compare: decimal exponent of the second operand",
    );
    (ordering, r)
}

/// Decimal exponent printed elsewhere for the probability `2^{-10^6}` of
/// blindly guessing a megabit key; kept for cross-checking because direct
/// computation gives −301030, not this figure.
pub const MEGABIT_KEY_CLAIMED_LOG10_EXPONENT: f64 = -326228.0;

/// Cross-checks the decimal rendering of `2^{-bits}` against a separately
/// claimed exponent; disagreement is flagged, never silently adopted.
///
/// Report entries: `log10_exponent_computed`, `log10_exponent_claimed`,
/// `exponents_agree`.
pub fn decimal_exponent_check(bits: f64, claimed_log10_exponent: f64) -> MetricReport {
    let computed = LogProb::<f64>::from_log2(-bits).decimal_parts().1 as f64;
    let mut r = MetricReport::new();
    r.push(
        "log10_exponent_computed",
        computed,
        "decimal_exponent_check: floor(-bits * log10(2))",
    );
    r.push(
        "log10_exponent_claimed",
        claimed_log10_exponent,
        "decimal_exponent_check: separately printed figure, kept for comparison only",
    );
    r.push(
        "exponents_agree",
        if (computed - claimed_log10_exponent).abs() <= 1.0 {
            1.0
        } else {
            0.0
        },
        "decimal_exponent_check: 1 when the claimed exponent matches within one decade; \
         a 0 flags the discrepancy",
    );
    r
}

/// Guessing bound `2^{-bits} + ε_sec` at key lengths whose floor term is far
/// beyond double range; the sum stays in log domain.
pub fn guessing_bound_log<T: Scalar>(key_len_bits: u64, epsilon_sec: LogProb<T>) -> LogProb<T> {
    let floor = LogProb::from_log2(-T::from_f64_c(key_len_bits as f64));
    floor.add(&epsilon_sec)
}

/// Operating scenario for the leak-rate estimate.
#[derive(Debug, Clone, Copy)]
pub struct RiskScenario {
    pub key_rate_bits_per_sec: f64,
    pub key_len_bits: u64,
    pub duration_sec: f64,
    pub epsilon_sec: LogProb<f64>,
}

/// Seconds in the 365-day year used by the headline estimates.
pub const YEAR_SEC: f64 = 3.1536e7;

impl RiskScenario {
    pub fn validate(&self) -> Result<()> {
        if self.key_rate_bits_per_sec <= 0.0 || self.key_len_bits == 0 || self.duration_sec <= 0.0 {
            return Err(Error::validation(
                "risk scenario requires positive rate, key length, and duration",
            ));
        }
        Ok(())
    }
}

/// Expected number of leaked keys over the scenario duration:
/// `keys · (ε_sec + 2^{-bits})` with the power term handled in log domain.
///
/// Report entries: `keys_exchanged`, `keys_exchanged_rounded`,
/// `leak_prob_per_key_log2`, `expected_leaks`, `expected_leaks_rounded`.
pub fn leak_rate(r: &RiskScenario) -> Result<MetricReport> {
    r.validate()?;
    let keys = r.key_rate_bits_per_sec * r.duration_sec / r.key_len_bits as f64;
    let floor = LogProb::from_log2(-(r.key_len_bits as f64));
    let per_key = r.epsilon_sec.add(&floor);
    let expected = per_key.mul_linear(keys).to_prob();

    let mut out = MetricReport::new();
    out.push(
        "keys_exchanged",
        keys,
        "leak_rate: key_rate * duration / key_len",
    );
    out.push(
        "keys_exchanged_rounded",
        round_to_one_significant(keys),
        "leak_rate: one-significant-figure rendering",
    );
    out.push(
        "leak_prob_per_key_log2",
        per_key.log2(),
        "leak_rate: log2(epsilon_sec + 2^{-bits}), log-domain sum",
    );
    out.push(
        "expected_leaks",
        expected,
        "leak_rate: keys * (epsilon_sec + 2^{-bits})",
    );
    out.push(
        "expected_leaks_rounded",
        round_to_one_significant(expected),
        "leak_rate: one-significant-figure rendering",
    );
    Ok(out)
}

/// Per-unit fatality baseline: fatalities divided by fleet size.
pub fn fatality_baseline(fatalities: u64, fleet: u64) -> Result<f64> {
    if fleet == 0 {
        return Err(Error::validation("fleet size must be positive"));
    }
    Ok(fatalities as f64 / fleet as f64)
}

/// Bound surviving `layers` rounds of Markov splitting of an averaged bound:
/// `(layers+1) · ε^{1/(layers+1)}`.
///
/// Each round splits at threshold `t = ε^{m/(m+1)}`: the exception
/// probability and the conditional bound are then both at most
/// `ε^{1/(m+1)}`.
///
/// Report entries: `cascade_bound`, `per_layer_tail`, `first_threshold`,
/// `layers`.
pub fn markov_cascade(avg_bound: f64, layers: u32) -> Result<MetricReport> {
    if !(avg_bound > 0.0 && avg_bound < 1.0) {
        return Err(Error::validation(format!(
            "averaged bound must lie strictly between 0 and 1, got {}",
            format_f64(avg_bound)
        )));
    }
    let m = layers as f64;
    let root = avg_bound.powf(1.0 / (m + 1.0));
    let bound = (m + 1.0) * root;
    let threshold = avg_bound.powf(m / (m + 1.0));

    let mut r = MetricReport::new();
    r.push(
        "cascade_bound",
        bound,
        "markov_cascade: (layers+1) * avg^{1/(layers+1)}",
    );
    r.push(
        "per_layer_tail",
        root,
        "markov_cascade: at threshold t = avg^{m/(m+1)} both the exception probability \
         and the conditional bound stay below avg^{1/(m+1)}",
    );
    r.push(
        "first_threshold",
        threshold,
        "markov_cascade: splitting threshold of the outermost layer",
    );
    r.push("layers", m, "markov_cascade: rounds of averaging undone");
    Ok(r)
}

/// Empirical Markov-inequality demonstration on a nonnegative sample set.
///
/// Report entries: `mean`, `empirical_tail`, `markov_bound`.
pub fn markov_tail_demo(samples: &[f64], threshold: f64) -> Result<MetricReport> {
    if samples.is_empty() {
        return Err(Error::validation("tail demonstration needs samples"));
    }
    if threshold <= 0.0 {
        return Err(Error::validation("threshold must be positive"));
    }
    if samples.iter().any(|&x| x < 0.0) {
        return Err(Error::validation("samples must be nonnegative"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let tail = samples.iter().filter(|&&x| x >= threshold).count() as f64 / n;
    let bound = mean / threshold;
    if tail > bound + 1e-12 {
        return Err(Error::numerical(format!(
            "empirical tail {tail} exceeded its Markov bound {bound}"
        )));
    }

    let mut r = MetricReport::new();
    r.push("mean", mean, "markov_tail_demo: empirical mean");
    r.push(
        "empirical_tail",
        tail,
        "markov_tail_demo: fraction of samples at or above the threshold",
    );
    r.push("markov_bound", bound, "markov_tail_demo: mean / threshold");
    Ok(r)
}
