//! Exact searches used once a relaxed model has proven the original
//! infeasible: first the cheapest integer point whose soft rows stay within
//! their allowance, then the point with the smallest worst-row violation.

use crate::error::Result;
use crate::linalg::RatMatrix;
use crate::mip::{MipStatus, MixedModel};
use crate::rational::Rat;
use crate::result::Ctx;
use crate::simplex::LinearProgram;

/// Integer variables with bounds, hard equalities and soft equalities.
pub(crate) struct SoftSystem {
    pub hard: RatMatrix,
    pub hard_rhs: Vec<Rat>,
    pub soft: RatMatrix,
    pub soft_rhs: Vec<Rat>,
    /// Permitted `|soft row - target|` per soft row.
    pub allowance: Vec<Rat>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    pub objective: Vec<Rat>,
}

pub(crate) enum Outcome {
    /// Cheapest point within the allowances.
    Within(Vec<i64>),
    /// No point fits the allowances; this one minimizes the largest violation.
    Closest(Vec<i64>),
    /// The hard rows and bounds admit no integer point.
    Empty,
}

fn to_ints(values: &[Rat], n: usize) -> Vec<i64> {
    values[..n].iter().map(|v| v.to_i64().expect("integer variable")).collect()
}

impl SoftSystem {
    /// Largest possible `|soft row - target|` over the bound box, per row.
    fn row_spread(&self, r: usize) -> Rat {
        let mut hi = -&self.soft_rhs[r];
        let mut lo = hi.clone();
        for j in 0..self.lower.len() {
            let a = &self.soft[(r, j)];
            let (x, y) = (a * &Rat::from_int(self.lower[j]), a * &Rat::from_int(self.upper[j]));
            hi += x.clone().max(y.clone());
            lo += x.min(y);
        }
        hi.abs().max(lo.abs())
    }

    /// Columns: x (n), then extra continuous columns described by `extra`.
    fn model(&self, extra_cols: usize, rows: Vec<(Vec<Rat>, Rat)>, lower: Vec<Rat>, upper: Vec<Rat>, objective: Vec<Rat>) -> MixedModel {
        let n = self.lower.len();
        let cols = n + extra_cols;
        let data: Vec<Vec<Rat>> = rows.iter().map(|(r, _)| r.clone()).collect();
        MixedModel {
            lp: LinearProgram {
                a: RatMatrix::from_rows_with_cols(data, cols),
                rhs: rows.into_iter().map(|(_, b)| b).collect(),
                lower,
                upper,
                objective,
            },
            integer_vars: (0..n).collect(),
        }
    }

    fn hard_rows(&self, cols: usize) -> Vec<(Vec<Rat>, Rat)> {
        (0..self.hard.rows())
            .map(|r| {
                let mut row = self.hard.row(r).to_vec();
                row.resize(cols, Rat::zero());
                (row, self.hard_rhs[r].clone())
            })
            .collect()
    }

    pub fn search(&self, ctx: &mut Ctx) -> Result<Outcome> {
        let n = self.lower.len();
        let k = self.soft.rows();
        let xl: Vec<Rat> = self.lower.iter().map(|&v| Rat::from_int(v)).collect();
        let xu: Vec<Rat> = self.upper.iter().map(|&v| Rat::from_int(v)).collect();

        // soft_r x + s_r = target_r with |s_r| <= allowance_r.
        let cols = n + k;
        let mut rows = self.hard_rows(cols);
        for r in 0..k {
            let mut row = self.soft.row(r).to_vec();
            row.resize(cols, Rat::zero());
            row[n + r] = Rat::one();
            rows.push((row, self.soft_rhs[r].clone()));
        }
        let mut lower = xl.clone();
        lower.extend(self.allowance.iter().map(|a| -a));
        let mut upper = xu.clone();
        upper.extend(self.allowance.iter().cloned());
        let mut objective = self.objective.clone();
        objective.resize(cols, Rat::zero());
        let sol = ctx.mip(&self.model(k, rows, lower, upper, objective))?;
        if sol.status == MipStatus::Optimal {
            return Ok(Outcome::Within(to_ints(&sol.values, n)));
        }

        // Minimize t subject to soft_r x + e_r = target_r, e_r - t + p_r = 0,
        // -e_r - t + q_r = 0 with p, q >= 0.
        let spread: Vec<Rat> = (0..k).map(|r| self.row_spread(r)).collect();
        let big = spread.iter().cloned().max().unwrap_or_else(Rat::zero);
        let (e0, t0, p0, q0) = (n, n + k, n + k + 1, n + 2 * k + 1);
        let cols = n + 3 * k + 1;
        let mut rows = self.hard_rows(cols);
        for r in 0..k {
            let mut row = self.soft.row(r).to_vec();
            row.resize(cols, Rat::zero());
            row[e0 + r] = Rat::one();
            rows.push((row, self.soft_rhs[r].clone()));
            let mut up = vec![Rat::zero(); cols];
            up[e0 + r] = Rat::one();
            up[t0] = Rat::from_int(-1);
            up[p0 + r] = Rat::one();
            rows.push((up, Rat::zero()));
            let mut down = vec![Rat::zero(); cols];
            down[e0 + r] = Rat::from_int(-1);
            down[t0] = Rat::from_int(-1);
            down[q0 + r] = Rat::one();
            rows.push((down, Rat::zero()));
        }
        let two_big = &big + &big;
        let mut lower = xl;
        let mut upper = xu;
        lower.extend(spread.iter().map(|s| -s));
        upper.extend(spread.iter().cloned());
        lower.push(Rat::zero());
        upper.push(big.clone());
        lower.extend((0..2 * k).map(|_| Rat::zero()));
        upper.extend((0..2 * k).map(|_| two_big.clone()));
        let mut objective = vec![Rat::zero(); cols];
        objective[t0] = Rat::one();
        let sol = ctx.mip(&self.model(3 * k + 1, rows, lower, upper, objective))?;
        if sol.status == MipStatus::Optimal {
            Ok(Outcome::Closest(to_ints(&sol.values, n)))
        } else {
            Ok(Outcome::Empty)
        }
    }
}
