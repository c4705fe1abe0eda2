//! The five-case machinery for normalized windows.
//!
//! A window with non-negative entries whose first entry is the orbit maximum
//! satisfies one of five inequality configurations, each with a closed-form
//! image after 10 or 11 raw steps:
//!
//! ```text
//! C1: x1 >= x2 >= x4 >= x3 >= 0                    --11--> (x1, x2+x3-x4, x3, x4)
//! C2: x1 >= x3 >= max(x2, x4) >= 0, x3 >= x2+x4    --10--> (x1, x1-x3+x2+x4, x2, x3)
//! C3: x1 >= x3 >= max(x2, x4) >= 0, x3 <= x2+x4    --11--> (x1, x2, x3, x2+x4-x3)
//! C4: x1 >= x4 >= x2 >= x3 >= 0                    --11--> (x1, x3, x4+x3-x2, x4)
//! C5: x1 >= x4 >= x3 >= x2 >= 0                    --11--> (x1, x2, x4, x2+x4-x3)
//! ```
//!
//! Case-to-case transitions follow a fixed graph whose only cycles through
//! `C4` are the four routes
//!
//! ```text
//! R1: C4 -> C5 -> C2 -> C1 ... C1 -> C4
//! R2: C4 -> C5 -> C2 -> C4
//! R3: C4 -> C5 -> C3 ... C3 -> C2 -> C1 ... C1 -> C4
//! R4: C4 -> C5 -> C3 ... C3 -> C2 -> C4
//! ```
//!
//! The conditions are non-strict, so on boundary ties a window can satisfy
//! several cases at once; the underlying orbit is the same either way and
//! only the bookkeeping differs. [`classify`] resolves ties with the fixed
//! priority `C4 > C5 > C1 > C2 > C3` (the anchor case first), while
//! [`trace_routes`] resolves them in favour of a graph edge so that traces
//! are always well-formed.

use alloc::vec::Vec;
use core::fmt;

use crate::recurrence::{all_nonnegative, first_is_max, step_forward, Tuple4};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    C1,
    C2,
    C3,
    C4,
    C5,
}

impl CaseId {
    /// Raw steps consumed by this case's closed form.
    pub fn steps(self) -> u8 {
        match self {
            CaseId::C2 => 10,
            _ => 11,
        }
    }

    pub const ALL: [CaseId; 5] = [CaseId::C1, CaseId::C2, CaseId::C3, CaseId::C4, CaseId::C5];
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseId::C1 => "C1",
            CaseId::C2 => "C2",
            CaseId::C3 => "C3",
            CaseId::C4 => "C4",
            CaseId::C5 => "C5",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CasesError {
    /// An entry is negative or the first entry is not maximal.
    NotNormalized,
    /// `trace_routes` requires a window satisfying the `C4` conditions.
    NotC4Start,
    /// A transition outside the case graph; unreachable for valid inputs
    /// and kept as an internal consistency check.
    GraphViolation { from: CaseId },
}

impl fmt::Display for CasesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CasesError::NotNormalized => {
                write!(f, "window is not normalized (negative entry or x1 not maximal)")
            }
            CasesError::NotC4Start => write!(f, "route tracing must start from a C4 window"),
            CasesError::GraphViolation { from } => {
                write!(f, "case transition out of {from} leaves the case graph")
            }
        }
    }
}

impl core::error::Error for CasesError {}

/// Do the case inequalities hold for this window? Does not check
/// normalization; callers guard that separately.
pub fn satisfies(w: &Tuple4, case: CaseId) -> bool {
    let [x1, x2, x3, x4] = w.entries();
    if !all_nonnegative(w) {
        return false;
    }
    match case {
        CaseId::C1 => x1 >= x2 && x2 >= x4 && x4 >= x3,
        CaseId::C2 => x1 >= x3 && x3 >= x2 && x3 >= x4 && *x3 >= x2 + x4,
        CaseId::C3 => x1 >= x3 && x3 >= x2 && x3 >= x4 && *x3 <= x2 + x4,
        CaseId::C4 => x1 >= x4 && x4 >= x2 && x2 >= x3,
        CaseId::C5 => x1 >= x4 && x4 >= x3 && x3 >= x2,
    }
}

const CLASSIFY_PRIORITY: [CaseId; 5] = [CaseId::C4, CaseId::C5, CaseId::C1, CaseId::C2, CaseId::C3];

/// Classify a normalized window, resolving boundary ties by the fixed
/// priority `C4 > C5 > C1 > C2 > C3`.
pub fn classify(w: &Tuple4) -> Result<CaseId, CasesError> {
    if !all_nonnegative(w) || !first_is_max(w) {
        return Err(CasesError::NotNormalized);
    }
    for case in CLASSIFY_PRIORITY {
        if satisfies(w, case) {
            return Ok(case);
        }
    }
    // A normalized window always sorts into some case: the three trailing
    // entries admit six orderings, each covered above.
    unreachable!("normalized window matches no case: {w}")
}

/// Closed-form image of a window under the given case's row. Only valid when
/// `satisfies(w, case)` holds; the result then equals `case.steps()` raw
/// applications of the map.
pub(crate) fn fast_forward_as(w: &Tuple4, case: CaseId) -> (Tuple4, u8) {
    let [x1, x2, x3, x4] = w.entries();
    let image = match case {
        CaseId::C1 => Tuple4::new(x1.clone(), &(x2 + x3) - x4, x3.clone(), x4.clone()),
        CaseId::C2 => Tuple4::new(x1.clone(), &(&(x1 - x3) + x2) + x4, x2.clone(), x3.clone()),
        CaseId::C3 => Tuple4::new(x1.clone(), x2.clone(), x3.clone(), &(x2 + x4) - x3),
        CaseId::C4 => Tuple4::new(x1.clone(), x3.clone(), &(x4 + x3) - x2, x4.clone()),
        CaseId::C5 => Tuple4::new(x1.clone(), x2.clone(), x4.clone(), &(x2 + x4) - x3),
    };
    (image, case.steps())
}

/// Classify and jump a whole case at once (10 steps for `C2`, 11 otherwise).
pub fn case_fast_forward(w: &Tuple4) -> Result<(Tuple4, u8), CasesError> {
    let case = classify(w)?;
    Ok(fast_forward_as(w, case))
}

/// Graph successors in tie-preference order: loops continue, and a route
/// closes at `C4` as soon as the conditions allow.
fn successors(case: CaseId) -> &'static [CaseId] {
    match case {
        CaseId::C4 => &[CaseId::C5],
        CaseId::C5 => &[CaseId::C3, CaseId::C2],
        CaseId::C3 => &[CaseId::C3, CaseId::C2],
        CaseId::C2 => &[CaseId::C4, CaseId::C1],
        CaseId::C1 => &[CaseId::C4, CaseId::C1],
    }
}

/// Walks an orbit one case block at a time, labelling each window so that
/// consecutive labels always form a graph edge.
pub(crate) struct CaseWalker {
    window: Tuple4,
    label: CaseId,
}

pub(crate) struct Block {
    pub label: CaseId,
    /// The 10 or 11 new sequence terms produced by the block, in order.
    pub terms: Vec<Scalar>,
}

impl CaseWalker {
    /// Start from a window satisfying `C4`.
    pub fn new(c4: Tuple4) -> Result<Self, CasesError> {
        if !all_nonnegative(&c4) || !first_is_max(&c4) {
            return Err(CasesError::NotNormalized);
        }
        if !satisfies(&c4, CaseId::C4) {
            return Err(CasesError::NotC4Start);
        }
        Ok(CaseWalker {
            window: c4,
            label: CaseId::C4,
        })
    }

    pub fn label(&self) -> CaseId {
        self.label
    }

    pub fn window(&self) -> &Tuple4 {
        &self.window
    }

    /// Step through one case block; afterwards `label()` names the case of
    /// the new current window.
    pub fn next_block(&mut self) -> Result<Block, CasesError> {
        let from = self.label;
        let k = from.steps();
        let mut terms = Vec::with_capacity(k as usize);
        let mut cur = self.window.clone();
        for _ in 0..k {
            cur = step_forward(&cur);
            terms.push(cur.x4().clone());
        }
        debug_assert_eq!(cur, fast_forward_as(&self.window, from).0);
        let next_label = successors(from)
            .iter()
            .copied()
            .find(|&c| satisfies(&cur, c))
            .ok_or(CasesError::GraphViolation { from })?;
        self.window = cur;
        self.label = next_label;
        Ok(Block { label: from, terms })
    }

    /// True when the upcoming block would return the identical window: the
    /// orbit is then periodic with no further case progress (constant zero
    /// orbit, all-equal monotone windows, or tied `C1`/`C3` loops).
    pub fn is_stuck(&self) -> bool {
        fast_forward_as(&self.window, self.label).0 == self.window
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteId {
    R1,
    R2,
    R3,
    R4,
    /// A fast-forward fixed point: the orbit repeats without leaving its
    /// case, so no `R1..R4` circuit applies.
    Degenerate,
}

impl fmt::Display for RouteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RouteId::R1 => "R1",
            RouteId::R2 => "R2",
            RouteId::R3 => "R3",
            RouteId::R4 => "R4",
            RouteId::Degenerate => "degenerate",
        };
        write!(f, "{s}")
    }
}

/// One `C4 -> ... -> C4` circuit. `m1` and `m3` count the visits to `C1`
/// and `C3` (so a single pass through `C1` gives `m1 = 1` and the loop edge
/// was taken `m1 - 1` times).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteSegment {
    pub route: RouteId,
    pub m1: u32,
    pub m3: u32,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteTrace {
    /// Visited cases with the raw steps each block consumed.
    pub cases: Vec<(CaseId, u8)>,
    /// Completed routes, in order; a trailing partial circuit stays out.
    pub routes: Vec<RouteSegment>,
    /// Window at which the trace stopped.
    pub end_window: Tuple4,
    /// Total raw steps consumed.
    pub steps_total: u64,
}

impl RouteTrace {
    pub fn visits(&self, case: CaseId) -> usize {
        self.cases.iter().filter(|(c, _)| *c == case).count()
    }
}

/// Trace the case sequence from a `C4` window through at most `max_cases`
/// blocks, segmented into routes.
pub fn trace_routes(c4: &Tuple4, max_cases: usize) -> Result<RouteTrace, CasesError> {
    let mut walker = CaseWalker::new(c4.clone())?;
    let mut cases = Vec::new();
    let mut routes = Vec::new();
    let mut steps_total = 0u64;
    let (mut m1, mut m3, mut route_steps) = (0u32, 0u32, 0u64);
    while cases.len() < max_cases {
        if walker.is_stuck() {
            routes.push(RouteSegment {
                route: RouteId::Degenerate,
                m1,
                m3,
                steps: route_steps,
            });
            break;
        }
        let block = walker.next_block()?;
        let k = block.label.steps();
        cases.push((block.label, k));
        steps_total += u64::from(k);
        route_steps += u64::from(k);
        match block.label {
            CaseId::C1 => m1 += 1,
            CaseId::C3 => m3 += 1,
            _ => {}
        }
        if walker.label() == CaseId::C4 {
            let route = match (m1 > 0, m3 > 0) {
                (false, false) => RouteId::R2,
                (true, false) => RouteId::R1,
                (false, true) => RouteId::R4,
                (true, true) => RouteId::R3,
            };
            routes.push(RouteSegment {
                route,
                m1,
                m3,
                steps: route_steps,
            });
            m1 = 0;
            m3 = 0;
            route_steps = 0;
        }
    }
    Ok(RouteTrace {
        cases,
        routes,
        end_window: walker.window().clone(),
        steps_total,
    })
}
