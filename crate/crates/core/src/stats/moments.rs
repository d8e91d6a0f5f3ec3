use serde::Serialize;

/// One-pass mean and central moments up to order four, mergeable in any
/// grouping (Pébay's pairwise update).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StreamMoments {
    count: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl StreamMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        *self = merge_moments(
            self,
            &StreamMoments {
                count: 1,
                mean: x,
                ..Self::default()
            },
        );
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn skewness(&self) -> f64 {
        let n = self.count as f64;
        n.sqrt() * self.m3 / self.m2.powf(1.5)
    }

    /// Excess kurtosis.
    pub fn kurtosis(&self) -> f64 {
        let n = self.count as f64;
        n * self.m4 / (self.m2 * self.m2) - 3.0
    }
}

impl FromIterator<f64> for StreamMoments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

pub fn merge_moments(a: &StreamMoments, b: &StreamMoments) -> StreamMoments {
    if a.count == 0 {
        return *b;
    }
    if b.count == 0 {
        return *a;
    }
    let na = a.count as f64;
    let nb = b.count as f64;
    let n = na + nb;
    let delta = b.mean - a.mean;
    let d_n = delta / n;
    let d_n2 = d_n * d_n;
    let cross = delta * d_n * na * nb;

    let mean = a.mean + d_n * nb;
    let m2 = a.m2 + b.m2 + cross;
    let m3 = a.m3 + b.m3 + cross * d_n * (na - nb) + 3.0 * d_n * (na * b.m2 - nb * a.m2);
    let m4 = a.m4
        + b.m4
        + cross * d_n2 * (na * na - na * nb + nb * nb)
        + 6.0 * d_n2 * (na * na * b.m2 + nb * nb * a.m2)
        + 4.0 * d_n * (na * b.m3 - nb * a.m3);
    StreamMoments {
        count: a.count + b.count,
        mean,
        m2,
        m3,
        m4,
    }
}
