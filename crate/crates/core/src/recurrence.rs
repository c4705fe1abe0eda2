//! The recurrence itself: forward/backward stepping, the orbit bound `M`,
//! and normalization to the window forms used by the classifier.

use alloc::vec::Vec;
use core::fmt;

use crate::cases::{self, CaseId};
use crate::scalar::{Scalar, Sign};

/// A sliding window `(x_n, x_{n+1}, x_{n+2}, x_{n+3})`: the state of the map
/// `F(x, y, z, w) = (y, z, w, max(0, y, z, w) - x)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tuple4 {
    entries: [Scalar; 4],
}

impl Tuple4 {
    pub fn new(x1: Scalar, x2: Scalar, x3: Scalar, x4: Scalar) -> Self {
        Tuple4 {
            entries: [x1, x2, x3, x4],
        }
    }

    pub fn zero() -> Self {
        Tuple4::new(Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::zero())
    }

    pub fn entries(&self) -> &[Scalar; 4] {
        &self.entries
    }

    pub fn x1(&self) -> &Scalar {
        &self.entries[0]
    }
    pub fn x2(&self) -> &Scalar {
        &self.entries[1]
    }
    pub fn x3(&self) -> &Scalar {
        &self.entries[2]
    }
    pub fn x4(&self) -> &Scalar {
        &self.entries[3]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }
}

impl From<[Scalar; 4]> for Tuple4 {
    fn from(entries: [Scalar; 4]) -> Self {
        Tuple4 { entries }
    }
}

impl fmt::Display for Tuple4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

impl fmt::Debug for Tuple4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tuple4{self}")
    }
}

/// One application of the map: `(x2, x3, x4, max(x2, x3, x4, 0) - x1)`.
pub fn step_forward(w: &Tuple4) -> Tuple4 {
    let [x1, x2, x3, x4] = &w.entries;
    let zero = Scalar::zero();
    let m = [x2, x3, x4, &zero].into_iter().max().unwrap();
    Tuple4::new(x2.clone(), x3.clone(), x4.clone(), m - x1)
}

/// The inverse: recovers `x_n = max(x_{n+1}, x_{n+2}, x_{n+3}, 0) - x_{n+4}`.
pub fn step_backward(w: &Tuple4) -> Tuple4 {
    let [a, b, c, d] = &w.entries;
    let zero = Scalar::zero();
    let m = [a, b, c, &zero].into_iter().max().unwrap();
    Tuple4::new(m - d, a.clone(), b.clone(), c.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A contiguous run of sequence values; consecutive windows satisfy the
/// recurrence exactly. The input window occupies indices 1..=4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSlice {
    pub start_index: i64,
    pub values: Vec<Scalar>,
}

impl OrbitSlice {
    /// Window starting at the i-th stored value.
    pub fn window_at(&self, i: usize) -> Tuple4 {
        Tuple4::new(
            self.values[i].clone(),
            self.values[i + 1].clone(),
            self.values[i + 2].clone(),
            self.values[i + 3].clone(),
        )
    }
}

/// `n` applications of the map in the given direction; returns the `n + 4`
/// sequence values covered.
pub fn orbit(w: &Tuple4, n: usize, direction: Direction) -> OrbitSlice {
    match direction {
        Direction::Forward => {
            let mut values: Vec<Scalar> = w.entries.to_vec();
            let mut cur = w.clone();
            values.reserve(n);
            for _ in 0..n {
                cur = step_forward(&cur);
                values.push(cur.x4().clone());
            }
            OrbitSlice {
                start_index: 1,
                values,
            }
        }
        Direction::Backward => {
            let mut rev: Vec<Scalar> = Vec::with_capacity(n);
            let mut cur = w.clone();
            for _ in 0..n {
                cur = step_backward(&cur);
                rev.push(cur.x1().clone());
            }
            rev.reverse();
            rev.extend(w.entries.iter().cloned());
            OrbitSlice {
                start_index: 1 - n as i64,
                values: rev,
            }
        }
    }
}

/// The bound `M = max(|x_1|, ..., |x_12|)`: every orbit term satisfies
/// `|x_n| <= M`, and `M` is attained by a non-negative term.
pub fn bound_m(w: &Tuple4) -> Scalar {
    orbit(w, 8, Direction::Forward)
        .values
        .iter()
        .map(Scalar::abs)
        .max()
        .unwrap()
}

/// Shift the window forward to the first term equal to the orbit maximum
/// `M = bound_m(w)`. If `M` only occurs with negative sign among the first
/// twelve terms, the positive occurrence lands at most four steps later, so
/// the search never goes past index 16.
pub fn normalize_max_first(w: &Tuple4) -> (Tuple4, usize) {
    let slice = orbit(w, 15, Direction::Forward);
    let m = slice.values[..12].iter().map(Scalar::abs).max().unwrap();
    let shift = slice.values[..16]
        .iter()
        .position(|v| *v == m)
        .expect("orbit maximum must appear within the first 16 terms");
    (slice.window_at(shift), shift)
}

pub const NORMALIZE_CASE_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    /// The case fast-forward reached a fixed point on a window that does not
    /// satisfy the `C4` inequalities. The orbit is then 11-periodic and has
    /// no window in case `C4` at all (e.g. `(3, 2, 1, 1)`).
    DegenerateLoop { window: Tuple4 },
    /// Exceeded the transition cap; the case loops are provably finite, so
    /// this indicates a bug.
    CapExceeded { cap: u64 },
}

impl fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizeError::DegenerateLoop { window } => {
                write!(f, "orbit has no C4 window: fast-forward fixed point at {window}")
            }
            NormalizeError::CapExceeded { cap } => {
                write!(f, "C4 normalization did not terminate within {cap} case transitions")
            }
        }
    }
}

impl core::error::Error for NormalizeError {}

/// Fast-forward an arbitrary window to an equivalent one satisfying the `C4`
/// inequalities `x1 >= x4 >= x2 >= x3 >= 0`; also returns the number of raw
/// steps consumed from the input window.
pub fn normalize_to_c4(w: &Tuple4) -> Result<(Tuple4, u64), NormalizeError> {
    normalize_to_c4_capped(w, NORMALIZE_CASE_CAP)
}

pub fn normalize_to_c4_capped(w: &Tuple4, cap: u64) -> Result<(Tuple4, u64), NormalizeError> {
    let (mut cur, shift) = normalize_max_first(w);
    let mut steps = shift as u64;
    let mut transitions = 0u64;
    while !cases::satisfies(&cur, CaseId::C4) {
        let case = cases::classify(&cur).expect("max-first window is normalized");
        let (next, k) = cases::fast_forward_as(&cur, case);
        if next == cur {
            return Err(NormalizeError::DegenerateLoop { window: cur });
        }
        steps += u64::from(k);
        cur = next;
        transitions += 1;
        if transitions > cap {
            return Err(NormalizeError::CapExceeded { cap });
        }
    }
    Ok((cur, steps))
}

/// Horizon-bounded check of window equivalence: does `b` occur on the
/// bi-infinite orbit of `a` within `horizon` steps in either direction?
/// Sound but incomplete (a `false` only rules the shift range searched).
pub fn equivalent(a: &Tuple4, b: &Tuple4, horizon: usize) -> bool {
    if a == b {
        return true;
    }
    let mut fwd = a.clone();
    let mut bwd = a.clone();
    for _ in 0..horizon {
        fwd = step_forward(&fwd);
        if fwd == *b {
            return true;
        }
        bwd = step_backward(&bwd);
        if bwd == *b {
            return true;
        }
    }
    false
}

/// True iff every entry is non-negative; used by preconditions.
pub(crate) fn all_nonnegative(w: &Tuple4) -> bool {
    w.entries.iter().all(|x| x.sign() != Sign::Negative)
}

/// True iff `x1` is a maximal entry.
pub(crate) fn first_is_max(w: &Tuple4) -> bool {
    let [x1, x2, x3, x4] = &w.entries;
    x1 >= x2 && x1 >= x3 && x1 >= x4
}
