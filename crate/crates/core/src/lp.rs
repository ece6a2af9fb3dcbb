//! Dense two-phase simplex over exact rationals, and the moment LP builder.
//!
//! Pivoting follows Bland's rule (lowest eligible index enters, ties in the
//! ratio test leave by lowest basic index), so degenerate vertices cannot
//! cycle. Duals are recovered from the final basis by solving `B^T y = c_B`
//! against the rows as originally stated.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::binomial::{raw_moments, BinomialSpec};
use crate::error::{Error, Result};
use crate::rational::{pow, uint, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// `opt c.x` subject to `rows[i].x (sense) rhs[i]` and `x >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardFormLP {
    pub direction: Direction,
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<Rational>,
}

impl StandardFormLP {
    pub fn new(direction: Direction, objective: Vec<Rational>) -> Self {
        Self {
            direction,
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, sense: Sense, rhs: Rational) -> &mut Self {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn validate(&self) -> Result<()> {
        if self.rows.len() != self.rhs.len() || self.rows.len() != self.senses.len() {
            return Err(Error::MalformedLp(format!(
                "{} rows, {} right-hand sides, {} senses",
                self.rows.len(),
                self.rhs.len(),
                self.senses.len()
            )));
        }
        if let Some((i, row)) = self
            .rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != self.objective.len())
        {
            return Err(Error::MalformedLp(format!(
                "row {i} has {} columns, objective has {}",
                row.len(),
                self.objective.len()
            )));
        }
        Ok(())
    }

    /// Whether `point` satisfies every row and sign constraint exactly.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars()
            && point.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(&self.senses).zip(&self.rhs).all(|((row, sense), b)| {
                let lhs: Rational = row.iter().zip(point).map(|(a, x)| a * x).sum();
                match sense {
                    Sense::Eq => &lhs == b,
                    Sense::Le => &lhs <= b,
                    Sense::Ge => &lhs >= b,
                }
            })
    }

    pub fn objective_value(&self, point: &[Rational]) -> Rational {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`]. Only `status` is meaningful unless it is `Optimal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPSolution {
    pub status: LpStatus,
    pub value: Rational,
    pub point: Vec<Rational>,
    /// Basic columns of the final tableau; indices past `num_vars` are slacks.
    pub basis: Vec<usize>,
    /// One multiplier per constraint row; `rhs . duals == value` at optimum.
    pub duals: Vec<Rational>,
}

impl LPSolution {
    fn without_optimum(status: LpStatus) -> Self {
        Self {
            status,
            value: Rational::zero(),
            point: Vec::new(),
            basis: Vec::new(),
            duals: Vec::new(),
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs of a minimization; the last entry is minus the objective.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    /// Whether each column may still enter the basis.
    eligible: Vec<bool>,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        if !self.cost[c].is_zero() {
            let factor = self.cost[c].clone();
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Loads a fresh cost vector and prices out the current basis.
    fn set_cost(&mut self, costs: &[Rational]) {
        let width = self.cost.len();
        let mut cost = vec![Rational::zero(); width];
        cost[..costs.len()].clone_from_slice(costs);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < costs.len() && !costs[b].is_zero() {
                let cb = &costs[b];
                for (v, a) in cost.iter_mut().zip(row) {
                    *v -= cb * a;
                }
            }
        }
        self.cost = cost;
    }

    fn run(&mut self) -> Outcome {
        let rhs = self.rhs_col();
        loop {
            let entering = (0..rhs).find(|&j| self.eligible[j] && self.cost[j].is_negative());
            let Some(c) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[c];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Outcome::Unbounded,
            }
        }
    }
}

/// Solves `lp` exactly. Infeasible and unbounded programs are reported
/// through [`LPSolution::status`].
pub fn solve_lp(lp: &StandardFormLP) -> Result<LPSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.num_rows();

    // Structural columns, then one slack per inequality row.
    let mut slack_of_row = vec![None; m];
    let mut ncols = n;
    for (i, sense) in lp.senses.iter().enumerate() {
        if *sense != Sense::Eq {
            slack_of_row[i] = Some(ncols);
            ncols += 1;
        }
    }
    let augmented: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = lp.rows[i].clone();
            row.resize(ncols, Rational::zero());
            if let Some(s) = slack_of_row[i] {
                row[s] = match lp.senses[i] {
                    Sense::Le => Rational::one(),
                    _ => -Rational::one(),
                };
            }
            row
        })
        .collect();

    // Flip rows to a non-negative right-hand side; a slack with coefficient
    // +1 after flipping can start basic, otherwise the row gets an artificial.
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut artificial_rows = Vec::new();
    for i in 0..m {
        let flip = lp.rhs[i].is_negative();
        let mut row: Vec<Rational> = augmented[i]
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        let b = if flip { -&lp.rhs[i] } else { lp.rhs[i].clone() };
        let start = slack_of_row[i].filter(|&s| row[s].is_one());
        row.push(b);
        match start {
            Some(s) => basis.push(s),
            None => {
                basis.push(usize::MAX);
                artificial_rows.push(i);
            }
        }
        rows.push(row);
    }
    let total = ncols + artificial_rows.len();
    for row in rows.iter_mut() {
        let b = row.pop().expect("rhs present");
        row.resize(total, Rational::zero());
        row.push(b);
    }
    for (a, &i) in artificial_rows.iter().enumerate() {
        rows[i][ncols + a] = Rational::one();
        basis[i] = ncols + a;
    }

    let mut tab = Tableau {
        rows,
        cost: vec![Rational::zero(); total + 1],
        basis,
        eligible: vec![true; total],
    };

    // Phase one: minimize the sum of artificials.
    if !artificial_rows.is_empty() {
        let mut phase_one = vec![Rational::zero(); total];
        for v in &mut phase_one[ncols..] {
            *v = Rational::one();
        }
        tab.set_cost(&phase_one);
        if let Outcome::Unbounded = tab.run() {
            return Err(Error::Disagreement("phase one cannot be unbounded".into()));
        }
        let rhs = tab.rhs_col();
        if !tab.cost[rhs].is_zero() {
            return Ok(LPSolution::without_optimum(LpStatus::Infeasible));
        }
        // Drive artificials out of the basis; rows where that is impossible
        // are linear combinations of the others and are dropped.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= ncols {
                if let Some(c) = (0..ncols).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, c);
                } else {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
        for e in &mut tab.eligible[ncols..] {
            *e = false;
        }
    }

    // Phase two on the true objective, as a minimization.
    let mut costs = vec![Rational::zero(); ncols];
    for (c, v) in costs.iter_mut().zip(&lp.objective) {
        *c = match lp.direction {
            Direction::Minimize => v.clone(),
            Direction::Maximize => -v,
        };
    }
    tab.set_cost(&costs);
    if let Outcome::Unbounded = tab.run() {
        return Ok(LPSolution::without_optimum(LpStatus::Unbounded));
    }

    let rhs = tab.rhs_col();
    let mut point = vec![Rational::zero(); n];
    for (row, &b) in tab.rows.iter().zip(&tab.basis) {
        if b < n {
            point[b] = row[rhs].clone();
        }
    }
    let value = lp.objective_value(&point);

    // Which original rows survived? Recover by matching the remaining
    // basis size against the rank; redundant rows get zero duals.
    let kept = surviving_rows(&augmented, &tab.basis);
    let mut objective_aug = lp.objective.clone();
    objective_aug.resize(ncols, Rational::zero());
    let duals = solve_duals(&augmented, &kept, &tab.basis, &objective_aug, m)?;

    let mut basis = tab.basis.clone();
    basis.sort_unstable();
    Ok(LPSolution {
        status: LpStatus::Optimal,
        value,
        point,
        basis,
        duals,
    })
}

/// Picks original rows on which the basis columns are nonsingular.
fn surviving_rows(augmented: &[Vec<Rational>], basis: &[usize]) -> Vec<usize> {
    // Greedy row selection by exact elimination on the basis submatrix.
    let mut kept = Vec::new();
    let mut reduced: Vec<Vec<Rational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for (i, row) in augmented.iter().enumerate() {
        let mut v: Vec<Rational> = basis.iter().map(|&b| row[b].clone()).collect();
        for (r, &p) in reduced.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let f = &v[p] / &r[p];
                for (x, y) in v.iter_mut().zip(r) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            kept.push(i);
            reduced.push(v);
            pivots.push(p);
        }
        if kept.len() == basis.len() {
            break;
        }
    }
    kept
}

/// Solves `B^T y = c_B` on the kept rows; other rows get `y = 0`.
fn solve_duals(
    augmented: &[Vec<Rational>],
    kept: &[usize],
    basis: &[usize],
    objective: &[Rational],
    m: usize,
) -> Result<Vec<Rational>> {
    let size = basis.len();
    // System: for each basic column b, sum_i y_i A[i][b] = c_b.
    let mut mat: Vec<Vec<Rational>> = basis
        .iter()
        .map(|&b| {
            let mut eq: Vec<Rational> = kept.iter().map(|&i| augmented[i][b].clone()).collect();
            eq.push(objective[b].clone());
            eq
        })
        .collect();
    let y = gauss_solve(&mut mat, size)
        .ok_or_else(|| Error::Disagreement("singular basis in dual recovery".into()))?;
    let mut duals = vec![Rational::zero(); m];
    for (&i, v) in kept.iter().zip(y) {
        duals[i] = v;
    }
    Ok(duals)
}

/// Exact Gaussian elimination on an augmented `size x (size+1)` system.
pub(crate) fn gauss_solve(mat: &mut [Vec<Rational>], size: usize) -> Option<Vec<Rational>> {
    if mat.len() != size {
        return None;
    }
    for col in 0..size {
        let pivot = (col..size).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, pivot);
        let inv = Rational::one() / &mat[col][col];
        for v in mat[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = mat[col].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(mat.iter().map(|row| row[size].clone()).collect())
}

/// The discrete moment LP over `q_0..q_n = Pr[S = i]`.
///
/// Row `j` (for `j = 0..=k`) reads `sum_i i^j q_i = E[X^j]` with
/// `X ~ Bin(n, p)`; row 0 is normalization. The objective is `q_n`.
pub fn moment_lp(spec: &BinomialSpec, k: u64, direction: Direction) -> Result<StandardFormLP> {
    let n = spec.n();
    if k < 1 {
        return Err(Error::KTooSmall { k, min: 1 });
    }
    if k > n {
        return Err(Error::KExceedsN { k, n });
    }
    Ok(moment_lp_unchecked(spec, k, direction))
}

pub(crate) fn moment_lp_unchecked(spec: &BinomialSpec, k: u64, direction: Direction) -> StandardFormLP {
    let n = spec.n();
    let mut objective = vec![Rational::zero(); n as usize + 1];
    objective[n as usize] = Rational::one();
    let mut lp = StandardFormLP::new(direction, objective);
    for (j, moment) in raw_moments(spec, k as usize).into_iter().enumerate() {
        let row = (0..=n).map(|i| pow(&uint(i), j as u64)).collect();
        lp.add_row(row, Sense::Eq, moment);
    }
    lp
}
