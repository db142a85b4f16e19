//! Zero-false-drop verification and the synchronous cover decoder.
//!
//! A code is ZFD of order `M` when no Boolean sum of up to `M` code words
//! covers a word outside the sum. On such a code the receiver recovers the
//! active set from one channel block by plain cover tests.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{boolean_sum, Code, Codeword};

/// Subsets examined before [`check_zfd`] gives up with
/// [`ZfdError::BudgetExceeded`].
pub const DEFAULT_SUBSET_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZfdError {
    #[error("activity bound M={max_active} must satisfy 1 <= M < T={users}")]
    ActivityBound { max_active: usize, users: usize },
    #[error("subset budget of {budget} exhausted; raise the budget to finish the check")]
    BudgetExceeded { budget: u64 },
}

/// A violating configuration: the sum over `subset` covers the word of
/// `violated`, a user outside the subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZfdWitness {
    pub subset: Vec<usize>,
    pub violated: usize,
}

/// Outcome of a ZFD check; `witness` is present exactly when `is_zfd` is
/// false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZfdReport {
    pub is_zfd: bool,
    pub witness: Option<ZfdWitness>,
}

/// Checks the zero-false-drop property of order `max_active` with the
/// default subset budget.
pub fn check_zfd(code: &Code, max_active: usize) -> Result<ZfdReport, ZfdError> {
    check_zfd_with_budget(code, max_active, DEFAULT_SUBSET_BUDGET)
}

/// Checks the zero-false-drop property of order `max_active`.
///
/// Only subsets of size exactly `M` are enumerated: a sum over fewer words
/// is covered by any size-`M` sum extending it (such an extension avoiding
/// the tagged user exists because `M < T`), so a violation at any size up to
/// `M` implies one at size `M`, and conversely. Subsets are visited in
/// lexicographic order and outside users in ascending order; the witness is
/// the first violating pair, which makes reports reproducible.
///
/// Each enumerated subset consumes one unit of `budget`; exceeding it
/// returns an explicit error instead of a silent partial answer.
pub fn check_zfd_with_budget(
    code: &Code,
    max_active: usize,
    budget: u64,
) -> Result<ZfdReport, ZfdError> {
    let users = code.users();
    if max_active == 0 || max_active >= users {
        return Err(ZfdError::ActivityBound { max_active, users });
    }

    let mut subset: Vec<usize> = (0..max_active).collect();
    let mut visited: u64 = 0;
    loop {
        visited += 1;
        if visited > budget {
            return Err(ZfdError::BudgetExceeded { budget });
        }

        let sum = boolean_sum(subset.iter().map(|&u| code.word(u)));
        for tagged in 0..users {
            if subset.binary_search(&tagged).is_ok() {
                continue;
            }
            if sum.covers(code.word(tagged)) {
                return Ok(ZfdReport {
                    is_zfd: false,
                    witness: Some(ZfdWitness {
                        subset: subset.clone(),
                        violated: tagged,
                    }),
                });
            }
        }

        if !next_combination(&mut subset, users) {
            return Ok(ZfdReport {
                is_zfd: true,
                witness: None,
            });
        }
    }
}

/// Advances `subset` to the next size-preserving combination of `0..users`
/// in lexicographic order. Returns false when `subset` was the last one.
fn next_combination(subset: &mut [usize], users: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] != users - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Declares active every user whose code word is covered by the channel
/// output. Returns ascending user indices. Panics if `output` does not
/// match the code length.
pub fn sync_decode(output: &Codeword, code: &Code) -> Vec<usize> {
    assert_eq!(
        output.len(),
        code.word_len(),
        "channel output length {} does not match code length {}",
        output.len(),
        code.word_len()
    );
    (0..code.users())
        .filter(|&u| output.covers(code.word(u)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{generate_code, CodeGenParams};

    fn code(words: &[&str]) -> Code {
        Code::new(
            words
                .iter()
                .map(|s| Codeword::from_bitstring(s).unwrap())
                .collect(),
        )
        .unwrap()
    }

    /// Literal "up to M" reference: enumerates every subset size from 1 to
    /// `max_active` in (size, lex) order and reports the first violation.
    fn check_zfd_naive(code: &Code, max_active: usize) -> ZfdReport {
        let users = code.users();
        for size in 1..=max_active {
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                let sum = boolean_sum(subset.iter().map(|&u| code.word(u)));
                for tagged in 0..users {
                    if subset.contains(&tagged) {
                        continue;
                    }
                    if sum.covers(code.word(tagged)) {
                        return ZfdReport {
                            is_zfd: false,
                            witness: Some(ZfdWitness {
                                subset,
                                violated: tagged,
                            }),
                        };
                    }
                }
                if !next_combination(&mut subset, users) {
                    break;
                }
            }
        }
        ZfdReport {
            is_zfd: true,
            witness: None,
        }
    }

    #[test]
    fn disjoint_singletons_are_zfd() {
        let report = check_zfd(&code(&["100", "010", "001"]), 2).unwrap();
        assert!(report.is_zfd);
        assert_eq!(report.witness, None);
    }

    #[test]
    fn covered_word_is_flagged_with_first_witness() {
        // Word 2 equals word 0 OR word 1; {0,1} is the lexicographically
        // first pair, so it forms the witness.
        let report = check_zfd(&code(&["110", "011", "111"]), 2).unwrap();
        assert!(!report.is_zfd);
        assert_eq!(
            report.witness,
            Some(ZfdWitness {
                subset: vec![0, 1],
                violated: 2
            })
        );
    }

    #[test]
    fn random_code_agrees_with_naive_enumeration() {
        let code = generate_code(&CodeGenParams {
            users: 8,
            code_len: 40,
            one_prob: 1.0 / 3.0,
            seed: 3,
        })
        .unwrap();
        let fast = check_zfd(&code, 2).unwrap();
        let naive = check_zfd_naive(&code, 2);
        assert_eq!(fast.is_zfd, naive.is_zfd);
        if let Some(witness) = &fast.witness {
            // The reduction reports a size-M witness; confirm it is genuine.
            let sum = boolean_sum(witness.subset.iter().map(|&u| code.word(u)));
            assert!(sum.covers(code.word(witness.violated)));
            assert!(!witness.subset.contains(&witness.violated));
        }
    }

    #[test]
    fn reduction_matches_naive_on_small_codes() {
        // Exhaustive spot check of the |S| = M reduction against the literal
        // "up to M" definition across many small random codes.
        for seed in 0..40 {
            for (users, code_len, m) in [(5, 6, 2), (6, 8, 2), (8, 10, 3), (4, 12, 2)] {
                let code = generate_code(&CodeGenParams {
                    users,
                    code_len,
                    one_prob: 0.35,
                    seed,
                })
                .unwrap();
                assert_eq!(
                    check_zfd(&code, m).unwrap().is_zfd,
                    check_zfd_naive(&code, m).is_zfd,
                    "T={users} n={code_len} M={m} seed={seed}"
                );
            }
        }
    }

    #[test]
    fn zfd_is_monotone_in_order() {
        for seed in 0..30 {
            let code = generate_code(&CodeGenParams {
                users: 7,
                code_len: 30,
                one_prob: 0.3,
                seed,
            })
            .unwrap();
            for m in (2..=3).rev() {
                if check_zfd(&code, m).unwrap().is_zfd {
                    assert!(
                        check_zfd(&code, m - 1).unwrap().is_zfd,
                        "order {m} but not {} (seed {seed})",
                        m - 1
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_range_activity_bound() {
        let c = code(&["100", "010", "001"]);
        assert_eq!(
            check_zfd(&c, 3).unwrap_err(),
            ZfdError::ActivityBound {
                max_active: 3,
                users: 3
            }
        );
        assert!(matches!(
            check_zfd(&c, 0).unwrap_err(),
            ZfdError::ActivityBound { .. }
        ));
    }

    #[test]
    fn tiny_budget_is_reported() {
        let code = generate_code(&CodeGenParams {
            users: 10,
            code_len: 60,
            one_prob: 0.3,
            seed: 1,
        })
        .unwrap();
        assert_eq!(
            check_zfd_with_budget(&code, 3, 5).unwrap_err(),
            ZfdError::BudgetExceeded { budget: 5 }
        );
    }

    #[test]
    fn decode_recovers_active_set_on_zfd_code() {
        let c = code(&["100", "010", "001"]);
        let sum = boolean_sum([c.word(0), c.word(2)]);
        assert_eq!(sync_decode(&sum, &c), vec![0, 2]);
    }

    #[test]
    fn decode_of_all_zero_output_is_empty() {
        let c = code(&["100", "010", "001"]);
        assert_eq!(sync_decode(&Codeword::zeros(3), &c), Vec::<usize>::new());
    }

    #[test]
    fn decode_false_drop_on_non_zfd_code() {
        // Word 2 is covered by word 0 OR word 1, so it is falsely declared.
        let c = code(&["110", "011", "111"]);
        let sum = boolean_sum([c.word(0), c.word(1)]);
        assert_eq!(sync_decode(&sum, &c), vec![0, 1, 2]);
    }

    #[test]
    #[should_panic(expected = "does not match code length")]
    fn decode_rejects_length_mismatch() {
        let c = code(&["100", "010", "001"]);
        sync_decode(&Codeword::zeros(4), &c);
    }

    #[test]
    fn decoder_is_exact_on_verified_codes() {
        // On every ZFD(order M) code, every active set of size <= M is
        // recovered exactly; exercised exhaustively for small T.
        let mut verified = 0;
        for (users, m, seed) in [(6usize, 2usize, 0u64), (8, 2, 5), (10, 3, 2)] {
            let code_len = crate::analysis::asymptotic_length(users, m, 0.5);
            let code = generate_code(&CodeGenParams {
                users,
                code_len,
                one_prob: 1.0 / (m as f64 + 1.0),
                seed,
            })
            .unwrap();
            if !check_zfd(&code, m).unwrap().is_zfd {
                continue;
            }
            verified += 1;
            for_all_subsets(users, m, &mut |subset| {
                let sum = boolean_sum(subset.iter().map(|&u| code.word(u)));
                assert_eq!(&sync_decode(&sum, &code), subset, "T={users} M={m}");
            });
        }
        assert!(verified > 0, "no code passed verification");
    }

    fn for_all_subsets(users: usize, max_size: usize, visit: &mut dyn FnMut(&Vec<usize>)) {
        for size in 1..=max_size {
            let mut subset: Vec<usize> = (0..size).collect();
            loop {
                visit(&subset);
                if !next_combination(&mut subset, users) {
                    break;
                }
            }
        }
    }

    #[test]
    fn report_json_shape() {
        let report = ZfdReport {
            is_zfd: false,
            witness: Some(ZfdWitness {
                subset: vec![0, 1],
                violated: 2,
            }),
        };
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["is_zfd"], false);
        assert_eq!(json["witness"]["subset"], serde_json::json!([0, 1]));
        assert_eq!(json["witness"]["violated"], 2);
        let clean = ZfdReport {
            is_zfd: true,
            witness: None,
        };
        assert_eq!(
            serde_json::to_value(&clean).unwrap()["witness"],
            serde_json::Value::Null
        );
    }
}
