use crate::corpus::InputVector;

/// Whether an empty clause (no included literals) outputs 1 or 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}

/// The `c × 2d` matrix of automaton states.
///
/// Alongside the states, each clause keeps a packed mask of its included
/// literals (state > N), updated whenever a state crosses the threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseBank {
    clauses: usize,
    literals: usize,
    half: u16,
    states: Vec<u16>,
    words_per_clause: usize,
    included: Vec<u64>,
    included_count: Vec<u32>,
}

impl ClauseBank {
    /// Every automaton starts at state N, the excluded side of the boundary.
    pub fn new(clauses: usize, dim: usize, half: u16) -> Self {
        assert!((1..=u16::MAX / 2).contains(&half), "N out of range");
        let literals = 2 * dim;
        let words_per_clause = literals.div_ceil(64);
        Self {
            clauses,
            literals,
            half,
            states: vec![half; clauses * literals],
            words_per_clause,
            included: vec![0; clauses * words_per_clause],
            included_count: vec![0; clauses],
        }
    }

    /// Builds a bank from raw row-major states, each in `1..=2N`.
    pub fn from_states(clauses: usize, dim: usize, half: u16, states: Vec<u16>) -> Option<Self> {
        if states.len() != clauses * 2 * dim || states.iter().any(|&s| s < 1 || s > 2 * half) {
            return None;
        }
        let mut bank = Self::new(clauses, dim, half);
        for (idx, s) in states.into_iter().enumerate() {
            bank.set_state(idx / bank.literals, idx % bank.literals, s);
        }
        Some(bank)
    }

    pub fn clauses(&self) -> usize {
        self.clauses
    }

    pub fn literals(&self) -> usize {
        self.literals
    }

    pub fn dim(&self) -> usize {
        self.literals / 2
    }

    /// The inclusion threshold N.
    pub fn half(&self) -> u16 {
        self.half
    }

    pub fn max_state(&self) -> u16 {
        2 * self.half
    }

    pub fn states(&self) -> &[u16] {
        &self.states
    }

    pub fn row(&self, clause: usize) -> &[u16] {
        &self.states[clause * self.literals..(clause + 1) * self.literals]
    }

    #[inline]
    pub fn state(&self, clause: usize, literal: usize) -> u16 {
        self.states[clause * self.literals + literal]
    }

    /// Sets a state, clamped to `1..=2N`, keeping the include mask in sync.
    #[inline]
    pub fn set_state(&mut self, clause: usize, literal: usize, state: u16) {
        let state = state.clamp(1, self.max_state());
        let slot = &mut self.states[clause * self.literals + literal];
        let was = *slot > self.half;
        *slot = state;
        let now = state > self.half;
        if was != now {
            let w = clause * self.words_per_clause + literal / 64;
            self.included[w] ^= 1 << (literal % 64);
            if now {
                self.included_count[clause] += 1;
            } else {
                self.included_count[clause] -= 1;
            }
        }
    }

    #[inline]
    pub fn increment(&mut self, clause: usize, literal: usize) {
        let s = self.state(clause, literal);
        self.set_state(clause, literal, s.saturating_add(1));
    }

    #[inline]
    pub fn decrement(&mut self, clause: usize, literal: usize) {
        let s = self.state(clause, literal);
        self.set_state(clause, literal, s.saturating_sub(1));
    }

    pub fn is_included(&self, clause: usize, literal: usize) -> bool {
        self.state(clause, literal) > self.half
    }

    /// Literal ids with state strictly above N, ascending.
    pub fn included_literals(&self, clause: usize) -> Vec<usize> {
        let mask = self.mask(clause);
        let mut out = Vec::with_capacity(self.included_count[clause] as usize);
        for (w, &bits) in mask.iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                out.push(w * 64 + b.trailing_zeros() as usize);
                b &= b - 1;
            }
        }
        out
    }

    pub fn included_count(&self, clause: usize) -> usize {
        self.included_count[clause] as usize
    }

    fn mask(&self, clause: usize) -> &[u64] {
        &self.included[clause * self.words_per_clause..(clause + 1) * self.words_per_clause]
    }

    /// AND over the included literals; an empty clause yields 1 in training
    /// and 0 at inference.
    pub fn clause_output(&self, clause: usize, x: &InputVector, mode: Mode) -> bool {
        debug_assert_eq!(x.len(), self.literals);
        if self.included_count[clause] == 0 {
            return mode == Mode::Train;
        }
        self.mask(clause)
            .iter()
            .zip(x.words())
            .all(|(inc, bits)| inc & !bits == 0)
    }

    pub fn clause_outputs(&self, x: &InputVector, mode: Mode) -> Vec<bool> {
        (0..self.clauses)
            .map(|j| self.clause_output(j, x, mode))
            .collect()
    }
}

/// `c × m` signed clause weights, one column per output word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    clauses: usize,
    outputs: usize,
    weights: Vec<i32>,
}

impl WeightMatrix {
    pub fn from_vec(clauses: usize, outputs: usize, weights: Vec<i32>) -> Option<Self> {
        (weights.len() == clauses * outputs).then_some(Self {
            clauses,
            outputs,
            weights,
        })
    }

    pub fn clauses(&self) -> usize {
        self.clauses
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, clause: usize, output: usize) -> i32 {
        self.weights[clause * self.outputs + output]
    }

    #[inline]
    pub fn step(&mut self, clause: usize, output: usize, up: bool) {
        let w = &mut self.weights[clause * self.outputs + output];
        *w = if up { w.saturating_add(1) } else { w.saturating_sub(1) };
    }
}
