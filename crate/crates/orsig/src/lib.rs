//! Signature coding toolkit for the multiple-access OR channel.
//!
//! `T` users share a noiseless channel whose output in every slot is the
//! Boolean OR of the bits sent by the currently active users. Each user owns
//! one fixed binary code word and transmits it upon becoming active; idle
//! users contribute zeros. The receiver must recover the set of active users
//! (identification) and, under frame-asynchronous access, their start slots
//! (synchronization).
//!
//! The crate is organized by task:
//!
//! - [`core`]: packed bit-vector code words, code books, Boolean-sum channel
//!   primitives, and seeded random code generation.
//! - [`zfd`]: zero-false-drop verification and the synchronous cover decoder.
//! - [`asynch`]: slotted asynchronous channel simulation plus the stateless
//!   and stateful sliding-window detectors.
//! - [`analysis`]: exact covering probabilities (recursion, transfer-matrix
//!   closed form, single-interferer closed form) and the analytic error and
//!   code-length bounds.
//! - [`montecarlo`]: seeded, reproducible experiments measuring empirical
//!   error rates against the analytic bounds.
//!
//! Conventions used throughout: user and slot indices are 0-based, and the
//! `log` appearing in code-length formulas is log base 2.
//!
//! ```
//! use orsig::{boolean_sum, generate_code, CodeGenParams};
//! use orsig::zfd::{check_zfd, sync_decode};
//!
//! // Draw a code at the recommended sizing for T = 8 users, M = 2 active.
//! let code = generate_code(&CodeGenParams {
//!     users: 8,
//!     code_len: orsig::analysis::asymptotic_length(8, 2, 0.5),
//!     one_prob: 1.0 / 3.0,
//!     seed: 1,
//! })?;
//! assert!(check_zfd(&code, 2)?.is_zfd);
//!
//! // Two users transmit one synchronous block; cover tests recover them.
//! let output = boolean_sum([code.word(1), code.word(6)]);
//! assert_eq!(sync_decode(&output, &code), vec![1, 6]);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod asynch;
pub mod core;
pub mod montecarlo;
pub mod zfd;

pub use crate::core::{boolean_sum, generate_code, Code, CodeGenParams, Codeword};
