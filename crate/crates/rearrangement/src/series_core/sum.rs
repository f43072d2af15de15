//! Compensated accumulation.
//!
//! Rearrangement experiments are about the order in which terms are added, so
//! every prefix sum in the crate goes through [`CompensatedSum`], fed in the
//! permuted order. Same inputs in the same order give bit-identical results.

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = CompensatedSum::new();
    s.extend(xs);
    s.value()
}

/// One compensated accumulator per coordinate.
#[derive(Clone, Debug)]
pub struct VectorSum {
    parts: Vec<CompensatedSum>,
}

impl VectorSum {
    pub fn new(dim: usize) -> Self {
        VectorSum { parts: vec![CompensatedSum::new(); dim] }
    }

    #[inline]
    pub fn add(&mut self, v: &[f64]) {
        for (p, x) in self.parts.iter_mut().zip(v) {
            p.add(*x);
        }
    }

    pub fn value(&self) -> Vec<f64> {
        self.parts.iter().map(|p| p.value()).collect()
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.parts[i].value()
    }

    pub fn dim(&self) -> usize {
        self.parts.len()
    }
}
