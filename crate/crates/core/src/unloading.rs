//! The unloading algorithm computing `R(m, n)`.
//!
//! Two engines: [`roe_r_naive`] rewrites full multiplicity vectors exactly as
//! the algorithm is stated (sort the tail, add the unloading vector while its
//! pairing is negative, rectify), and [`roe_r_block`] tracks only the pair
//! (first entry, tail sum), using that from a uniform start the tail never
//! has two entries differing by more than one.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A multiplicity vector `(m_1, ..., m_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultVector(Vec<i64>);

impl MultVector {
    pub fn new(entries: Vec<i64>) -> Self {
        MultVector(entries)
    }

    pub fn uniform(m: i64, n: usize) -> Self {
        MultVector(vec![m; n])
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> i64 {
        self.0[0]
    }

    pub fn tail_sum(&self) -> i64 {
        self.0[1..].iter().sum()
    }

    pub fn dot(&self, other: &MultVector) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for MultVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// The unloading vector `v_i = (1, -1, ..., -1, 0, ..., 0)` with `i`
/// entries equal to `-1`, for vectors of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnloadVector {
    pub i: usize,
    pub n: usize,
}

impl UnloadVector {
    pub fn new(i: usize, n: usize) -> Result<Self> {
        if i < 2 || i + 1 > n {
            return Err(Error::domain(
                "unloading vector",
                format!(
                    "index i = {i} outside 2..={} for n = {n}",
                    n.saturating_sub(1)
                ),
            ));
        }
        Ok(UnloadVector { i, n })
    }

    /// `w . v_i = w_1 - (w_2 + ... + w_{i+1})`.
    pub fn dot(&self, w: &MultVector) -> i64 {
        let e = w.entries();
        e[0] - e[1..=self.i].iter().sum::<i64>()
    }

    pub fn to_vector(&self) -> MultVector {
        let mut v = vec![0; self.n];
        v[0] = 1;
        for x in &mut v[1..=self.i] {
            *x = -1;
        }
        MultVector(v)
    }
}

/// `v(a, b, c, n) = (a, b, ..., b, b-1, ..., b-1)` with `c` entries equal
/// to `b` and `n` entries in all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockVector {
    pub a: i64,
    pub b: i64,
    pub c: usize,
    pub n: usize,
}

impl BlockVector {
    /// The unique block vector with first entry `a` and tail sum `s`.
    pub fn from_tail_sum(a: i64, s: i64, n: usize) -> Self {
        let len = (n - 1) as i64;
        let b = s.div_euclid(len) + i64::from(s.rem_euclid(len) != 0);
        let c = (s - len * (b - 1)) as usize;
        BlockVector { a, b, c, n }
    }

    /// Recognizes a vector whose sorted tail takes at most two adjacent
    /// values.
    pub fn from_vector(w: &MultVector) -> Option<Self> {
        let e = w.entries();
        if e.len() < 2 {
            return None;
        }
        let tail = &e[1..];
        if tail.windows(2).any(|p| p[0] < p[1]) {
            return None;
        }
        let (hi, lo) = (tail[0], tail[tail.len() - 1]);
        if hi - lo > 1 {
            return None;
        }
        let block = Self::from_tail_sum(e[0], tail.iter().sum(), e.len());
        (block.expand() == *w).then_some(block)
    }

    /// `S = (n - 1)(b - 1) + c`.
    pub fn tail_sum(&self) -> i64 {
        (self.n as i64 - 1) * (self.b - 1) + self.c as i64
    }

    pub fn expand(&self) -> MultVector {
        let mut v = Vec::with_capacity(self.n);
        v.push(self.a);
        v.extend(std::iter::repeat_n(self.b, self.c));
        v.extend(std::iter::repeat_n(self.b - 1, self.n - 1 - self.c));
        MultVector(v)
    }
}

impl fmt::Display for BlockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({};{}^{},{}^{})",
            self.a,
            self.b,
            self.c,
            self.b - 1,
            self.n - 1 - self.c
        )
    }
}

/// State after routine `i` from the uniform start: first entry `R_i`,
/// tail sum `S_i`, and `rho = S_i mod (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoeState {
    pub i: usize,
    pub r: i64,
    pub s: i64,
    pub rho: i64,
}

impl RoeState {
    fn new(i: usize, r: i64, s: i64, n: usize) -> Self {
        RoeState {
            i,
            r,
            s,
            rho: s.rem_euclid(n as i64 - 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Snapshot {
    Block(BlockVector),
    Full(MultVector),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub routine: usize,
    pub step: u64,
    pub first: i64,
    pub tail_sum: i64,
    pub snapshot: Snapshot,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "i={} j={} R={} S={} w=",
            self.routine, self.step, self.first, self.tail_sum
        )?;
        match &self.snapshot {
            Snapshot::Block(b) => write!(f, "{b}"),
            Snapshot::Full(w) => write!(f, "{w}"),
        }
    }
}

/// One line per step: the uniform start as `i=1 j=0`, then every step of
/// every routine that changed the vector.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UnloadTrace {
    pub steps: Vec<TraceStep>,
}

impl UnloadTrace {
    fn record(&mut self, routine: usize, step: u64, w: &MultVector) {
        let snapshot = match BlockVector::from_vector(w) {
            Some(b) => Snapshot::Block(b),
            None => Snapshot::Full(w.clone()),
        };
        self.steps.push(TraceStep {
            routine,
            step,
            first: w.first(),
            tail_sum: w.tail_sum(),
            snapshot,
        });
    }

    fn record_block(&mut self, routine: usize, step: u64, r: i64, s: i64, n: usize) {
        self.steps.push(TraceStep {
            routine,
            step,
            first: r,
            tail_sum: s,
            snapshot: Snapshot::Block(BlockVector::from_tail_sum(r, s, n)),
        });
    }

    pub fn is_all_block(&self) -> bool {
        self.steps
            .iter()
            .all(|s| matches!(s.snapshot, Snapshot::Block(_)))
    }
}

impl fmt::Display for UnloadTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(f, "{step}")?;
        }
        Ok(())
    }
}

fn check_run_args(m: u64, n: u64) -> Result<()> {
    if m < 1 {
        return Err(Error::domain("unloading", "m must be at least 1"));
    }
    if n < 3 {
        return Err(Error::domain(
            "unloading",
            format!("n must be at least 3, got {n}"),
        ));
    }
    Ok(())
}

/// Sorts entries 2..n into nonincreasing order.
pub fn sort_tail(w: &MultVector) -> MultVector {
    let mut v = w.0.clone();
    if v.len() > 1 {
        v[1..].sort_unstable_by(|a, b| b.cmp(a));
    }
    MultVector(v)
}

/// Replaces negative entries by zero.
pub fn rectify(w: &MultVector) -> MultVector {
    MultVector(w.0.iter().map(|&x| x.max(0)).collect())
}

/// `w` itself if `w . v_i >= 0`, otherwise the rectification of `w + v_i`.
/// The flag reports whether rectification changed anything.
fn q_step_inner(w: &MultVector, v: UnloadVector) -> (MultVector, bool) {
    if v.dot(w) >= 0 {
        return (w.clone(), false);
    }
    let mut e = w.0.clone();
    e[0] += 1;
    for x in &mut e[1..=v.i] {
        *x -= 1;
    }
    let clipped = e.iter().any(|&x| x < 0);
    (rectify(&MultVector(e)), clipped)
}

pub fn q_step(w: &MultVector, i: usize) -> Result<MultVector> {
    let v = UnloadVector::new(i, w.len())?;
    Ok(q_step_inner(w, v).0)
}

/// `g_i = p q_i p`, with `p` the tail sort.
pub fn g_step(w: &MultVector, i: usize) -> Result<MultVector> {
    let v = UnloadVector::new(i, w.len())?;
    Ok(sort_tail(&q_step_inner(&sort_tail(w), v).0))
}

/// Iterates `g_i` to its fixpoint. Returns the fixpoint and the number of
/// applications that changed the vector.
pub fn run_routine(w: &MultVector, i: usize) -> Result<(MultVector, u64)> {
    let v = UnloadVector::new(i, w.len())?;
    let mut cur = w.clone();
    let mut steps = 0;
    loop {
        let next = sort_tail(&q_step_inner(&sort_tail(&cur), v).0);
        if next == cur {
            return Ok((cur, steps));
        }
        cur = next;
        steps += 1;
    }
}

/// Result of the vector-rewriting engine.
#[derive(Debug, Clone, Serialize)]
pub struct NaiveRun {
    pub value: u64,
    pub final_vector: MultVector,
    /// `(R_i, S_i)` after each routine, starting with `i = 1`.
    pub states: Vec<RoeState>,
    /// Number of steps in which rectification zeroed a negative entry.
    pub clipped_steps: u64,
    pub trace: Option<UnloadTrace>,
}

/// Runs routines `O_2, ..., O_{n-1}` on `(m, ..., m)` by literal vector
/// rewriting.
pub fn roe_r_naive(m: u64, n: u64, want_trace: bool) -> Result<NaiveRun> {
    check_run_args(m, n)?;
    let len = n as usize;
    let mut w = MultVector::uniform(m as i64, len);
    let mut trace = want_trace.then(UnloadTrace::default);
    if let Some(t) = trace.as_mut() {
        t.record(1, 0, &w);
    }
    let mut states = vec![RoeState::new(1, w.first(), w.tail_sum(), len)];
    let mut clipped_steps = 0;
    for i in 2..len {
        let v = UnloadVector::new(i, len)?;
        let mut step = 0;
        loop {
            let (q, clipped) = q_step_inner(&sort_tail(&w), v);
            let next = sort_tail(&q);
            if next == w {
                break;
            }
            clipped_steps += u64::from(clipped);
            step += 1;
            w = next;
            if let Some(t) = trace.as_mut() {
                t.record(i, step, &w);
            }
        }
        states.push(RoeState::new(i, w.first(), w.tail_sum(), len));
    }
    Ok(NaiveRun {
        value: w.first() as u64,
        final_vector: w,
        states,
        clipped_steps,
        trace,
    })
}

/// Least `j >= 0` with `i * floor((S - j i)/(n-1)) + min(rho_j, i) <= R + j`,
/// where `rho_j = (S - j i) mod (n - 1)`.
///
/// The left side is the sum of the `i` largest tail entries of the block
/// vector after `j` steps, so this is the number of steps routine `i` takes
/// before its pairing with `v_i` turns nonnegative.
pub fn solve_t(i: u64, r_prev: i64, s_prev: i64, n: u64) -> u64 {
    let i = i as i64;
    let len = n as i64 - 1;
    let mut j: i64 = 0;
    loop {
        let rest = s_prev - j * i;
        let top = i * rest.div_euclid(len) + rest.rem_euclid(len).min(i);
        if top <= r_prev + j {
            return j as u64;
        }
        j += 1;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockRun {
    pub value: u64,
    /// `R_1, S_1` through `R_{n-1}, S_{n-1}`.
    pub states: Vec<RoeState>,
}

/// `R(m, n)` from the recurrences `R_i = R_{i-1} + t`, `S_i = S_{i-1} - i t`.
pub fn roe_r_block(m: u64, n: u64) -> Result<BlockRun> {
    roe_r_block_inner(m, n, None)
}

/// Block engine run that also emits the step trace, in the same format
/// as the naive engine.
pub fn roe_r_block_traced(m: u64, n: u64) -> Result<(BlockRun, UnloadTrace)> {
    let mut trace = UnloadTrace::default();
    let run = roe_r_block_inner(m, n, Some(&mut trace))?;
    Ok((run, trace))
}

fn roe_r_block_inner(m: u64, n: u64, mut trace: Option<&mut UnloadTrace>) -> Result<BlockRun> {
    check_run_args(m, n)?;
    let len = n as usize;
    let mut r = m as i64;
    let mut s = (n as i64 - 1) * m as i64;
    if let Some(t) = trace.as_deref_mut() {
        t.record_block(1, 0, r, s, len);
    }
    let mut states = Vec::with_capacity(len - 1);
    states.push(RoeState::new(1, r, s, len));
    for i in 2..len {
        let t = solve_t(i as u64, r, s, n) as i64;
        if let Some(tr) = trace.as_deref_mut() {
            for j in 1..=t {
                tr.record_block(i, j as u64, r + j, s - j * i as i64, len);
            }
        }
        r += t;
        s -= i as i64 * t;
        states.push(RoeState::new(i, r, s, len));
    }
    Ok(BlockRun {
        value: r as u64,
        states,
    })
}

/// Runs both engines and fails with a state-by-state diff if they differ.
pub fn roe_r_checked(m: u64, n: u64) -> Result<u64> {
    let naive = roe_r_naive(m, n, false)?;
    let block = roe_r_block(m, n)?;
    if naive.value == block.value && naive.states == block.states {
        return Ok(block.value);
    }
    Err(Error::EngineDisagreement {
        m,
        n,
        naive: naive.value,
        block: block.value,
        diff: state_diff(&naive.states, &block.states),
    })
}

pub fn state_diff(a: &[RoeState], b: &[RoeState]) -> String {
    let mut out = String::new();
    for (x, y) in a.iter().zip(b) {
        if x != y {
            out.push_str(&format!(
                "i={}: naive (R={}, S={}) block (R={}, S={})\n",
                x.i, x.r, x.s, y.r, y.s
            ));
        }
    }
    if a.len() != b.len() {
        out.push_str(&format!(
            "state counts differ: {} vs {}\n",
            a.len(),
            b.len()
        ));
    }
    out
}
