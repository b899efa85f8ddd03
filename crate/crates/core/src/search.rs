//! Bounded derivative-free minimization: a coarse tensor grid followed by
//! coordinate descent with step halving. Deterministic for a given objective.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("evaluation budget of {budget} exhausted (best value so far {best_value})")]
    BudgetExhausted { budget: usize, best_value: f64 },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(&'static str),
}

/// One axis of the starting grid, `points` equally spaced values on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points }
    }

    fn spacing(&self) -> f64 {
        if self.points < 2 {
            1.0
        } else {
            (self.hi - self.lo) / (self.points - 1) as f64
        }
    }

    fn value(&self, i: usize) -> f64 {
        if self.points < 2 {
            0.5 * (self.lo + self.hi)
        } else {
            self.lo + self.spacing() * i as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub value: f64,
    pub argmin: Vec<f64>,
    pub evaluations: usize,
}

struct Counter<'a, F> {
    f: &'a F,
    used: usize,
    budget: usize,
    best: f64,
}

impl<F: Fn(&[f64]) -> f64> Counter<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64, SearchError> {
        if self.used >= self.budget {
            return Err(SearchError::BudgetExhausted {
                budget: self.budget,
                best_value: self.best,
            });
        }
        self.used += 1;
        let v = (self.f)(x);
        if v < self.best {
            self.best = v;
        }
        Ok(v)
    }
}

/// Minimizes `f` over the grid spanned by `axes`, then refines the best grid
/// point by coordinate descent until every step is below `final_step`.
pub fn grid_then_descent<F>(
    f: F,
    axes: &[GridAxis],
    final_step: f64,
    budget: usize,
) -> Result<Minimum, SearchError>
where
    F: Fn(&[f64]) -> f64,
{
    if axes.is_empty() || axes.iter().any(|a| a.points == 0 || !(a.hi >= a.lo)) {
        return Err(SearchError::InvalidConfig("every axis needs lo <= hi and a point"));
    }
    if !(final_step > 0.0) {
        return Err(SearchError::InvalidConfig("final step must be positive"));
    }
    let mut counter = Counter {
        f: &f,
        used: 0,
        budget,
        best: f64::INFINITY,
    };

    let dim = axes.len();
    let mut index = vec![0usize; dim];
    let mut best_x: Vec<f64> = axes.iter().map(|a| a.value(0)).collect();
    let mut best_v = f64::INFINITY;
    'grid: loop {
        let x: Vec<f64> = index.iter().zip(axes).map(|(&i, a)| a.value(i)).collect();
        let v = counter.eval(&x)?;
        if v < best_v {
            best_v = v;
            best_x = x;
        }
        for d in 0..dim {
            index[d] += 1;
            if index[d] < axes[d].points {
                continue 'grid;
            }
            index[d] = 0;
        }
        break;
    }

    let mut steps: Vec<f64> = axes.iter().map(|a| 0.5 * a.spacing()).collect();
    while steps.iter().cloned().fold(0.0, f64::max) >= final_step {
        let mut improved = false;
        for d in 0..dim {
            for dir in [1.0, -1.0] {
                let mut x = best_x.clone();
                x[d] += dir * steps[d];
                let v = counter.eval(&x)?;
                if v < best_v {
                    best_v = v;
                    best_x = x;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
        }
    }

    Ok(Minimum {
        value: best_v,
        argmin: best_x,
        evaluations: counter.used,
    })
}
