//! Compensated (Kahan/Neumaier) accumulation for probability vectors.

/// Neumaier-compensated running sum.
///
/// Keeps a separate correction term so that long accumulations of doubles
/// (probability masses, CDF prefixes, weighted moments) stay accurate to a
/// few ulps instead of drifting by `O(n) * eps`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.s + self.c
    }
}

/// Compensated sum of an iterator of doubles.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.total()
}
