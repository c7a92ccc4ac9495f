//! Time-varying adversarial objective for online regret experiments.
//!
//! Every `period` steps the loss is `big * x`, otherwise `-x`, over the
//! interval [-1, 1]. The rare large gradient pushes the iterate up; the
//! frequent small ones pull it down. The best fixed point in hindsight is
//! x = -1 whenever big > period - 1, which makes cumulative regret against
//! it a meaningful score for adaptive methods.

use crate::error::Result;
use crate::numeric::ParamVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarialStream {
    pub big: f64,
    pub period: u64,
}

impl AdversarialStream {
    pub fn new(big: f64, period: u64) -> Result<Self> {
        if period == 0 || big <= 0.0 {
            return Err(crate::error::Error::InvalidParam(format!(
                "adversarial stream requires period >= 1 and big > 0, got period={period}, big={big}"
            )));
        }
        Ok(AdversarialStream { big, period })
    }

    pub fn dim(&self) -> usize {
        1
    }

    fn coefficient(&self, t: u64) -> f64 {
        if t % self.period == 1 || self.period == 1 {
            self.big
        } else {
            -1.0
        }
    }

    /// f_t(x); steps are 1-based.
    pub fn value_at(&self, t: u64, x: &ParamVector) -> f64 {
        self.coefficient(t) * x[0]
    }

    pub fn grad_at(&self, t: u64, _x: &ParamVector) -> ParamVector {
        ParamVector::new(vec![self.coefficient(t)])
    }

    /// Best fixed point in hindsight over [-1, 1].
    pub fn comparator(&self) -> ParamVector {
        ParamVector::new(vec![-1.0])
    }

    /// f_t evaluated at the comparator.
    pub fn comparator_value(&self, t: u64) -> f64 {
        -self.coefficient(t)
    }
}
