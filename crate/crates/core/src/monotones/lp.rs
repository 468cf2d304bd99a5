//! Dense revised simplex for `min cᵀx  s.t.  Ax = b, x ≥ 0` with Bland's rule.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Optimal primal/dual pair returned by [`solve`].
#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// Dual multipliers `y` (`Aᵀy ≤ c` at optimality, `bᵀy = objective`).
    pub dual: Vec<T>,
    pub iterations: usize,
}

/// Problem in standard form; `a` is row-major `m × nvars`.
#[derive(Clone, Debug)]
pub struct StandardLp<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

struct Tableau<T> {
    /// Rows of A (sign-normalized so b ≥ 0) with artificial columns appended implicitly.
    a: Vec<Vec<T>>,
    b: Vec<T>,
    m: usize,
    nvars: usize,
    basis: Vec<usize>,
    binv: Vec<Vec<T>>,
    xb: Vec<T>,
    tol: T,
}

impl<T: Real> Tableau<T> {
    fn column(&self, j: usize) -> Vec<T> {
        if j < self.nvars {
            (0..self.m).map(|i| self.a[i][j]).collect()
        } else {
            let mut e = vec![T::zero(); self.m];
            e[j - self.nvars] = T::one();
            e
        }
    }

    fn binv_times(&self, v: &[T]) -> Vec<T> {
        self.binv.iter().map(|row| row.iter().zip(v).map(|(&r, &x)| r * x).sum()).collect()
    }

    fn duals(&self, cost: &dyn Fn(usize) -> T) -> Vec<T> {
        let cb: Vec<T> = self.basis.iter().map(|&j| cost(j)).collect();
        (0..self.m).map(|k| (0..self.m).map(|i| cb[i] * self.binv[i][k]).sum()).collect()
    }

    fn reduced_cost(&self, j: usize, y: &[T], cost: &dyn Fn(usize) -> T) -> T {
        if j < self.nvars {
            cost(j) - (0..self.m).map(|i| y[i] * self.a[i][j]).sum::<T>()
        } else {
            cost(j) - y[j - self.nvars]
        }
    }

    fn pivot(&mut self, row: usize, entering: usize, u: &[T]) {
        let p = u[row];
        for k in 0..self.m {
            self.binv[row][k] = self.binv[row][k] / p;
        }
        self.xb[row] = self.xb[row] / p;
        for i in 0..self.m {
            if i != row && u[i] != T::zero() {
                let f = u[i];
                for k in 0..self.m {
                    let v = self.binv[row][k];
                    self.binv[i][k] = self.binv[i][k] - f * v;
                }
                self.xb[i] = self.xb[i] - f * self.xb[row];
            }
        }
        self.basis[row] = entering;
    }

    /// Recomputes B⁻¹ and x_B from scratch to shed accumulated rounding.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let cols: Vec<Vec<T>> = self.basis.iter().map(|&j| self.column(j)).collect();
        let mut aug: Vec<Vec<T>> = (0..m)
            .map(|i| {
                let mut row: Vec<T> = (0..m).map(|k| cols[k][i]).collect();
                row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
                row
            })
            .collect();
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&x, &y| aug[x][col].abs().partial_cmp(&aug[y][col].abs()).unwrap())
                .unwrap();
            if aug[piv][col].abs() < T::epsilon() {
                return Err(Error::LpFailure("singular basis".into()));
            }
            aug.swap(col, piv);
            let p = aug[col][col];
            for v in aug[col].iter_mut() {
                *v = *v / p;
            }
            for r in 0..m {
                if r != col {
                    let f = aug[r][col];
                    if f != T::zero() {
                        for k in 0..2 * m {
                            let v = aug[col][k];
                            aug[r][k] = aug[r][k] - f * v;
                        }
                    }
                }
            }
        }
        self.binv = aug.into_iter().map(|row| row[m..].to_vec()).collect();
        self.xb = self.binv_times(&self.b);
        Ok(())
    }

    /// Runs simplex iterations; columns for which `allowed` is false never enter.
    fn optimize(
        &mut self,
        cost: &dyn Fn(usize) -> T,
        allowed: &dyn Fn(usize) -> bool,
        max_iter: usize,
        iterations: &mut usize,
    ) -> Result<()> {
        let total = self.nvars + self.m;
        loop {
            if *iterations >= max_iter {
                return Err(Error::LpFailure(format!("iteration limit {max_iter} reached")));
            }
            if *iterations % 64 == 63 {
                self.refactor()?;
            }
            let y = self.duals(cost);
            let in_basis = |j: usize| self.basis.contains(&j);
            let Some(entering) = (0..total).find(|&j| {
                allowed(j) && !in_basis(j) && self.reduced_cost(j, &y, cost) < -self.tol
            }) else {
                return Ok(());
            };
            let u = self.binv_times(&self.column(entering));
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                if u[i] > self.tol {
                    let ratio = self.xb[i].max(T::zero()) / u[i];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - self.tol
                                || (ratio <= best + self.tol && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::LpFailure("problem is unbounded".into()));
            };
            self.pivot(row, entering, &u);
            *iterations += 1;
        }
    }
}

/// Two-phase revised simplex. Returns [`Error::Infeasible`] when no `x ≥ 0`
/// satisfies the constraints.
pub fn solve<T: Real>(lp: &StandardLp<T>) -> Result<LpSolution<T>> {
    let m = lp.b.len();
    if lp.a.len() != m || lp.a.iter().any(|r| r.len() != lp.c.len()) {
        return Err(Error::DimensionMismatch(lp.a.len(), m));
    }
    let nvars = lp.c.len();
    let mut a = lp.a.clone();
    let mut b = lp.b.clone();
    let mut flipped = vec![false; m];
    for i in 0..m {
        if b[i] < T::zero() {
            b[i] = -b[i];
            for v in a[i].iter_mut() {
                *v = -*v;
            }
            flipped[i] = true;
        }
    }
    let scale = b.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let tol = T::epsilon().sqrt() * T::lit(1e-3) * scale;
    let mut t = Tableau {
        a,
        b: b.clone(),
        m,
        nvars,
        basis: (nvars..nvars + m).collect(),
        binv: (0..m).map(|i| (0..m).map(|k| if i == k { T::one() } else { T::zero() }).collect()).collect(),
        xb: b,
        tol,
    };
    let max_iter = 50 * (nvars + m) + 1000;
    let mut iterations = 0;

    let phase1 = |j: usize| if j >= nvars { T::one() } else { T::zero() };
    t.optimize(&phase1, &|_| true, max_iter, &mut iterations)?;
    t.refactor()?;
    let infeas: T = t.basis.iter().zip(&t.xb).filter(|(&j, _)| j >= nvars).map(|(_, &v)| v).sum();
    if infeas > T::epsilon().sqrt() * scale * T::lit(10.0) {
        return Err(Error::Infeasible);
    }
    // Drive remaining (zero-valued) artificials out of the basis where possible.
    for row in 0..m {
        if t.basis[row] >= nvars {
            let pick = (0..nvars).filter(|j| !t.basis.contains(j)).find(|&j| {
                let r: T = (0..m).map(|k| t.binv[row][k] * t.a[k][j]).sum();
                r.abs() > T::lit(1e-6)
            });
            if let Some(j) = pick {
                let u = t.binv_times(&t.column(j));
                t.pivot(row, j, &u);
            }
        }
    }

    let c = lp.c.clone();
    let phase2 = move |j: usize| if j < nvars { c[j] } else { T::zero() };
    t.optimize(&phase2, &|j| j < nvars, max_iter, &mut iterations)?;
    t.refactor()?;

    let mut x = vec![T::zero(); nvars];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < nvars {
            x[j] = t.xb[i].max(T::zero());
        }
    }
    let objective = x.iter().zip(&lp.c).map(|(&xi, &ci)| xi * ci).sum();
    let mut dual = t.duals(&phase2);
    for (y, f) in dual.iter_mut().zip(&flipped) {
        if *f {
            *y = -*y;
        }
    }
    Ok(LpSolution { x, objective, dual, iterations })
}
