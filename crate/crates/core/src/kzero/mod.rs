//! Grothendieck groups of window categories.
//!
//! A window is a finite set of slots: degrees for a plain grading, `N`-parts
//! for `N ⋊ H`, cosets for an extension `1 → N → G → H → 1`. Positivity of
//! the support makes every idempotent over a window block lower triangular,
//! so its class is read off slot by slot from the diagonal blocks. The
//! brute-force oracle in [`oracle`] classifies idempotent matrices over small
//! finite rings without using any of this machinery.

mod element;
pub mod oracle;
mod theorems;
mod window;

pub use element::{shift_action, K0Element, K0Group, Label};
pub use oracle::{k0_bruteforce, IdemClassTable};
pub use theorems::{
    associated_graded, corollary_strong_reduction, filtered_graded_agreement, theorem_quotient_iso,
    theorem_semidirect_iso, toric, Check, ToricReport, WindowIso,
};
pub use window::{k0_class, k0_of_window, random_window_object, KWindow, SlotRule};
