//! Toy intercept-resend protocol with exact enumeration.
//!
//! Each round, Alice sends a uniformly random bit in a uniformly random
//! basis (rectilinear Z or diagonal X). With probability `q` the
//! eavesdropper intercepts: she measures in a uniformly random basis and
//! resends her outcome state. Bob measures in a uniformly random basis;
//! sifting conditions every round on matching Alice/Bob bases. Her record
//! per round — blank, or her basis and outcome — spans five symbols, so her
//! register is diagonal and the exact maximum-a-posteriori guessing path
//! applies to every instance produced here.
//!
//! All probabilities are exact rationals: dyadic factors from the coin
//! flips times powers of `q` and `1−q`, with `q` taken as the exact dyadic
//! value of its double representation.

use crate::discrimination;
use crate::error::{Error, Result};
use crate::metrics;
use crate::opalg::HermitianOperator;
use crate::report::MetricReport;
use crate::scalar::Prob;
use crate::states::{self, Branch, CqState, KeySpace};
use crate::tol::Tolerances;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Eavesdropper record symbols per round: blank or (basis, outcome).
const SYMBOLS_PER_ROUND: usize = 5;

/// Key post-processing applied to the sifted bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaMode {
    /// Keys are the raw sifted bits.
    None,
    /// Both keys compress to the XOR of their bits.
    Parity,
}

/// Protocol configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Bb84Config {
    pub rounds: u32,
    pub intercept_prob: f64,
    #[serde(default = "default_sift")]
    pub sift: bool,
    #[serde(default = "default_pa_mode")]
    pub pa_mode: PaMode,
}

fn default_sift() -> bool {
    true
}

fn default_pa_mode() -> PaMode {
    PaMode::None
}

/// Enumerated protocol output.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub state: CqState<f64>,
    pub qber: f64,
    pub sifted_fraction: f64,
}

/// Exact-rational form of the enumeration, for identities that hold with
/// equality rather than within rounding.
#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub bits: u32,
    pub eve_dim: usize,
    /// Branches `(k_A, k_B, probability, diagonal of the conditional)`.
    pub branches: Vec<(usize, usize, BigRational, Vec<BigRational>)>,
    pub qber: BigRational,
    pub sifted_fraction: BigRational,
}

/// Per-round mass table: `mass[b][kb][symbol]`, absolute (includes the 1/2
/// for Alice's bit).
type RoundTable = [[[BigRational; SYMBOLS_PER_ROUND]; 2]; 2];

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exhaustive one-round enumeration over Alice's bit and basis, the
/// intercept decision, the eavesdropper's basis and outcome, Bob's basis
/// (conditioned away under sifting), and Bob's outcome.
fn enumerate_round(q: &BigRational, sift: bool) -> RoundTable {
    let mut table: RoundTable = std::array::from_fn(|_| {
        std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()))
    });
    let half = rational(1, 2);
    let not_q = BigRational::one() - q.clone();

    let mut add = |b: usize, kb: usize, sym: usize, mass: BigRational| {
        table[b][kb][sym] = table[b][kb][sym].clone() + mass;
    };

    // Bases: 0 = rectilinear, 1 = diagonal. Symbol indices: 0 blank,
    // 1 + basis * 2 + outcome otherwise.
    for b in 0..2usize {
        for a in 0..2usize {
            let p_ba = half.clone() * half.clone();
            let bob_bases: &[usize] = if sift { &[a] } else { &[0, 1] };
            let bob_weight = if sift {
                BigRational::one()
            } else {
                half.clone()
            };

            // No intercept: the state |b⟩ in basis a reaches Bob unchanged.
            for &beta in bob_bases {
                let w = p_ba.clone() * not_q.clone() * bob_weight.clone();
                if beta == a {
                    add(b, b, 0, w);
                } else {
                    for r in 0..2usize {
                        add(b, r, 0, w.clone() * half.clone());
                    }
                }
            }

            // Intercept: the eavesdropper measures in basis e and resends
            // her outcome state |o⟩ in basis e.
            for e in 0..2usize {
                let p_e = p_ba.clone() * q.clone() * half.clone();
                let outcomes: Vec<(usize, BigRational)> = if e == a {
                    vec![(b, BigRational::one())]
                } else {
                    vec![(0, half.clone()), (1, half.clone())]
                };
                for (o, p_o) in outcomes {
                    let sym = 1 + e * 2 + o;
                    for &beta in bob_bases {
                        let w = p_e.clone() * p_o.clone() * bob_weight.clone();
                        if beta == e {
                            add(b, o, sym, w);
                        } else {
                            for r in 0..2usize {
                                add(b, r, sym, w.clone() * half.clone());
                            }
                        }
                    }
                }
            }
        }
    }
    table
}

/// Exact enumeration of the full protocol.
pub fn simulate_bb84_exact(c: &Bb84Config) -> Result<ExactOutcome> {
    simulate_bb84_exact_with(c, &Tolerances::default())
}

pub fn simulate_bb84_exact_with(c: &Bb84Config, tol: &Tolerances<f64>) -> Result<ExactOutcome> {
    if c.rounds == 0 {
        return Err(Error::validation("protocol needs at least one round"));
    }
    if !(0.0..=1.0).contains(&c.intercept_prob) {
        return Err(Error::validation(format!(
            "intercept probability {} outside [0, 1]",
            c.intercept_prob
        )));
    }
    let n = c.rounds as usize;
    let eve_dim = SYMBOLS_PER_ROUND
        .checked_pow(c.rounds)
        .ok_or_else(|| Error::resource("eavesdropper register overflow".to_string()))?;
    let branch_count: usize = match c.pa_mode {
        PaMode::None => 4usize
            .checked_pow(c.rounds)
            .ok_or_else(|| Error::resource("branch count overflow".to_string()))?,
        PaMode::Parity => 4,
    };
    // Dense conditional blocks take eve_dim^2 entries each; keep the whole
    // enumeration within the square of the dense-dimension cap.
    let budget = tol.dim_cap * tol.dim_cap;
    if eve_dim
        .checked_mul(eve_dim)
        .and_then(|v| v.checked_mul(branch_count))
        .is_none_or(|v| v > budget)
    {
        return Err(Error::resource(format!(
            "enumeration of {branch_count} branches with register dimension {eve_dim} \
             exceeds the configured budget ({budget})"
        )));
    }

    let q = BigRational::from_dyadic(c.intercept_prob);
    let table = enumerate_round(&q, c.sift);

    // Per-(b, kb) total mass and conditional symbol distribution.
    let mut pair_mass: [[BigRational; 2]; 2] =
        std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()));
    for b in 0..2 {
        for kb in 0..2 {
            pair_mass[b][kb] = table[b][kb]
                .iter()
                .fold(BigRational::zero(), |acc, m| acc + m.clone());
        }
    }

    let bits = match c.pa_mode {
        PaMode::None => c.rounds,
        PaMode::Parity => 1,
    };

    // Accumulate weighted diagonals per (k_A, k_B); with parity compression
    // several bit strings merge into the same key pair.
    let size = 1usize << bits;
    let mut acc: Vec<Vec<BigRational>> = vec![Vec::new(); size * size];
    let mut acc_prob: Vec<BigRational> = vec![BigRational::zero(); size * size];
    let mut qber = BigRational::zero();

    for ka_bits in 0..(1usize << n) {
        for kb_bits in 0..(1usize << n) {
            // Joint probability of this bit-string pair and the conditional
            // symbol diagonal, as a tensor product over rounds.
            let mut prob = BigRational::one();
            for r in 0..n {
                let shift = n - 1 - r;
                let b = (ka_bits >> shift) & 1;
                let kb = (kb_bits >> shift) & 1;
                prob *= pair_mass[b][kb].clone();
            }
            if prob.is_zero() {
                continue;
            }
            let mut diag = vec![BigRational::one()];
            for r in 0..n {
                let shift = n - 1 - r;
                let b = (ka_bits >> shift) & 1;
                let kb = (kb_bits >> shift) & 1;
                let cond = &table[b][kb];
                let total = &pair_mass[b][kb];
                let mut next = Vec::with_capacity(diag.len() * SYMBOLS_PER_ROUND);
                for d in &diag {
                    for sym in cond.iter() {
                        next.push(d.clone() * sym.clone() / total.clone());
                    }
                }
                diag = next;
            }

            let errors = (ka_bits ^ kb_bits).count_ones() as i64;
            qber += prob.clone() * rational(errors, n as i64);

            let (ka, kb) = match c.pa_mode {
                PaMode::None => (ka_bits, kb_bits),
                PaMode::Parity => (
                    (ka_bits.count_ones() & 1) as usize,
                    (kb_bits.count_ones() & 1) as usize,
                ),
            };
            let slot = ka * size + kb;
            if acc[slot].is_empty() {
                acc[slot] = vec![BigRational::zero(); eve_dim];
            }
            for (a, d) in acc[slot].iter_mut().zip(&diag) {
                *a = a.clone() + prob.clone() * d.clone();
            }
            acc_prob[slot] = acc_prob[slot].clone() + prob;
        }
    }

    let mut branches = Vec::new();
    let mut total = BigRational::zero();
    for ka in 0..size {
        for kb in 0..size {
            let slot = ka * size + kb;
            if acc_prob[slot].is_zero() {
                continue;
            }
            let p = acc_prob[slot].clone();
            total += p.clone();
            let diag: Vec<BigRational> = acc[slot].iter().map(|v| v.clone() / p.clone()).collect();
            branches.push((ka, kb, p, diag));
        }
    }
    debug_assert!(total.is_one(), "exact enumeration must sum to one");

    let sifted_fraction = if c.sift {
        rational(1, 2)
    } else {
        BigRational::one()
    };
    Ok(ExactOutcome {
        bits,
        eve_dim,
        branches,
        qber,
        sifted_fraction,
    })
}

/// Enumerates the protocol and converts to the floating representation.
pub fn simulate_bb84(c: &Bb84Config) -> Result<SimOutcome> {
    simulate_bb84_with(c, &Tolerances::default())
}

pub fn simulate_bb84_with(c: &Bb84Config, tol: &Tolerances<f64>) -> Result<SimOutcome> {
    let exact = simulate_bb84_exact_with(c, tol)?;
    let ks = KeySpace::new_with(exact.bits, tol)?;
    let branches = exact
        .branches
        .iter()
        .map(|(ka, kb, p, diag)| {
            let d: Vec<f64> = diag.iter().map(Prob::to_f64_lossy).collect();
            Branch {
                ka: *ka,
                kb: *kb,
                prob: p.to_f64_lossy(),
                eve_op: HermitianOperator::from_diag(&d),
            }
        })
        .collect();
    Ok(SimOutcome {
        state: CqState::new_with(ks, exact.eve_dim, branches, tol)?,
        qber: exact.qber.to_f64_lossy(),
        sifted_fraction: exact.sifted_fraction.to_f64_lossy(),
    })
}

/// Runs the protocol and pushes the resulting state through the security
/// pipeline at the averaged reference system: triangle decomposition,
/// guessing bound, and best guessing value.
pub fn pipeline_report(c: &Bb84Config) -> Result<MetricReport> {
    pipeline_report_with(c, &Tolerances::default())
}

pub fn pipeline_report_with(c: &Bb84Config, tol: &Tolerances<f64>) -> Result<MetricReport> {
    let outcome = simulate_bb84_with(c, tol)?;
    let sigma = states::sigma_avg(&outcome.state);

    let mut report = MetricReport::new();
    report.push("rounds", c.rounds as f64, "pipeline_report: configuration");
    report.push(
        "intercept_prob",
        c.intercept_prob,
        "pipeline_report: configuration",
    );
    report.push("qber", outcome.qber, "pipeline_report: exact enumeration");
    report.push(
        "sifted_fraction",
        outcome.sifted_fraction,
        "pipeline_report: probability a raw round survives basis reconciliation",
    );
    report.absorb(
        "decomposition",
        metrics::epsilon_decomposition_with(&outcome.state, &sigma, tol)?,
    );
    report.absorb(
        "guess",
        discrimination::guess_bound_with(&outcome.state, &sigma, tol)?,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn config(rounds: u32, q: f64) -> Bb84Config {
        Bb84Config {
            rounds,
            intercept_prob: q,
            sift: true,
            pa_mode: PaMode::None,
        }
    }

    #[test]
    fn no_interception_leaves_no_trace() {
        let out = simulate_bb84(&config(1, 0.0)).unwrap();
        assert_eq!(out.qber, 0.0);
        // Both conditionals are the pure blank record.
        let bg = discrimination::best_guess_prob(&out.state).unwrap();
        assert_abs_diff_eq!(bg.value, 0.5, epsilon = 1e-12);
        let sigma = states::sigma_avg(&out.state);
        let eps = metrics::trace_distance_cq(
            &states::correctify(&out.state),
            &states::ideal_state(out.state.keyspace(), &sigma).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(eps, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn full_interception_single_round_oracle() {
        // Four-way enumeration oracle over the eavesdropper's basis and
        // outcome: a matching basis reads the bit, a mismatched basis leaves
        // a uniform guess, so her per-bit success is 3/4 and the disturbance
        // gives QBER 1/4 exactly.
        let out = simulate_bb84(&config(1, 1.0)).unwrap();
        assert_eq!(out.qber, 0.25);
        let bg = discrimination::best_guess_prob(&out.state).unwrap();
        assert_abs_diff_eq!(bg.value, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn two_rounds_full_interception_product_structure() {
        let out = simulate_bb84(&config(2, 1.0)).unwrap();
        let bg = discrimination::best_guess_prob(&out.state).unwrap();
        assert_abs_diff_eq!(bg.value, 0.5625, epsilon = 1e-12);
        assert!(bg.is_exact());
    }

    #[test]
    fn round_table_mass_is_exactly_one_up_to_six_rounds() {
        // The per-round table itself sums to one, so products over any
        // number of rounds do as well; verify the product form explicitly
        // through six rounds without materializing conditionals.
        for q_f in [0.0, 0.25, 1.0 / 3.0, 0.75, 1.0] {
            let q = BigRational::from_dyadic(q_f);
            for sift in [true, false] {
                let table = enumerate_round(&q, sift);
                let mut pair = [
                    [BigRational::zero(), BigRational::zero()],
                    [BigRational::zero(), BigRational::zero()],
                ];
                for b in 0..2 {
                    for kb in 0..2 {
                        pair[b][kb] = table[b][kb]
                            .iter()
                            .fold(BigRational::zero(), |acc, m| acc + m.clone());
                    }
                }
                for n in 1..=6usize {
                    let mut total = BigRational::zero();
                    for ka in 0..(1usize << n) {
                        for kb in 0..(1usize << n) {
                            let mut p = BigRational::one();
                            for r in 0..n {
                                let shift = n - 1 - r;
                                p *= pair[(ka >> shift) & 1][(kb >> shift) & 1].clone();
                            }
                            total += p;
                        }
                    }
                    assert!(total.is_one(), "q={q_f} sift={sift} n={n}");
                }
            }
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one_exactly() {
        for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for rounds in 1..=3 {
                let exact = simulate_bb84_exact(&Bb84Config {
                    rounds,
                    intercept_prob: q,
                    sift: true,
                    pa_mode: PaMode::None,
                })
                .unwrap();
                let total = exact
                    .branches
                    .iter()
                    .fold(BigRational::zero(), |acc, (_, _, p, _)| acc + p.clone());
                assert!(total.is_one(), "q={q} rounds={rounds}");
                for (_, _, p, diag) in &exact.branches {
                    assert!(p.is_pos());
                    let tr = diag
                        .iter()
                        .fold(BigRational::zero(), |acc, v| acc + v.clone());
                    assert!(tr.is_one(), "conditional trace must be exactly one");
                }
            }
        }
    }

    #[test]
    fn qber_is_exactly_quarter_q() {
        for (q, expect) in [
            (1.0, rational(1, 4)),
            (0.5, rational(1, 8)),
            (0.0, BigRational::zero()),
        ] {
            let exact = simulate_bb84_exact(&config(2, q)).unwrap();
            assert_eq!(exact.qber, expect, "q={q}");
        }
    }

    #[test]
    fn parity_compression_yields_one_bit_keys() {
        let out = simulate_bb84(&Bb84Config {
            rounds: 2,
            intercept_prob: 1.0,
            sift: true,
            pa_mode: PaMode::Parity,
        })
        .unwrap();
        assert_eq!(out.state.keyspace().bits(), 1);
        assert_eq!(out.state.eve_dim(), 25);
        // Parity errors happen when exactly one of two bits flips:
        // 2·(1/4)·(3/4) = 3/8.
        assert_abs_diff_eq!(out.state.mismatch_prob(), 3.0 / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn unsifted_mode_keeps_all_rounds() {
        let out = simulate_bb84(&Bb84Config {
            rounds: 1,
            intercept_prob: 0.0,
            sift: false,
            pa_mode: PaMode::None,
        })
        .unwrap();
        assert_eq!(out.sifted_fraction, 1.0);
        // Half the rounds use mismatched bases, each erring half the time.
        assert_abs_diff_eq!(out.qber, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn pipeline_report_floor_case() {
        let r = pipeline_report(&config(1, 0.0)).unwrap();
        assert_abs_diff_eq!(r.get("guess.gap").unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.get("guess.guess_bound").unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn pipeline_report_full_interception() {
        let r = pipeline_report(&config(1, 1.0)).unwrap();
        assert_abs_diff_eq!(r.get("qber").unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(
            r.get("guess.best_guess_prob").unwrap(),
            0.75,
            epsilon = 1e-10
        );
        assert!(
            r.get("guess.best_guess_prob").unwrap() <= r.get("guess.guess_bound").unwrap() + 1e-10
        );
    }

    #[test]
    fn guessing_grows_with_interception() {
        let mut prev = 0.0;
        for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let out = simulate_bb84(&config(1, q)).unwrap();
            let bg = discrimination::best_guess_prob(&out.state).unwrap();
            assert!(bg.value >= prev - 1e-12, "q={q}");
            prev = bg.value;
        }
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let err = simulate_bb84(&config(9, 0.5));
        assert!(matches!(err, Err(Error::Resource(_))));
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            simulate_bb84(&config(0, 0.5)),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            simulate_bb84(&config(1, 1.5)),
            Err(Error::Validation(_))
        ));
    }
}
