//! Term sources: lazily evaluated real or vector series `a_0, a_1, ...`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use super::SeriesError;

/// A rule that produces terms of a series on demand.
///
/// Implementors must be deterministic: evaluating the same index twice yields
/// the identical value.
pub trait TermRule: Send + Sync {
    fn dim(&self) -> usize;
    fn term_into(&self, n: usize, out: &mut [f64]) -> Result<(), SeriesError>;
    fn describe(&self) -> String;
}

/// A lazily enumerable series.
#[derive(Clone)]
pub enum TermSource {
    /// `(-1)^n / (n+1)`
    AltHarmonic,
    /// `(-1)^n / (n+1)^alpha`
    AltPower { alpha: f64 },
    /// `1 / (n+1)`
    Harmonic,
    /// `1 / (n+1)^alpha`
    Power { alpha: f64 },
    Zero,
    /// A finite prefix read from a file, continued by a tail rule.
    File(Arc<FileSource>),
    /// `d` scalar sources read side by side as one `R^d` series.
    Stack(Vec<TermSource>),
    /// Termwise sum of sources of equal dimension.
    Sum(Vec<TermSource>),
    Rule(Arc<dyn TermRule>),
}

impl fmt::Debug for TermSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl TermSource {
    pub fn alt_power(alpha: f64) -> Result<Self, SeriesError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(SeriesError::InvalidParameter(format!("exponent must be positive, got {alpha}")));
        }
        Ok(TermSource::AltPower { alpha })
    }

    pub fn power(alpha: f64) -> Result<Self, SeriesError> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(SeriesError::InvalidParameter(format!("exponent must be nonnegative, got {alpha}")));
        }
        Ok(TermSource::Power { alpha })
    }

    pub fn rule<R: TermRule + 'static>(r: R) -> Self {
        TermSource::Rule(Arc::new(r))
    }

    /// Stack scalar sources into one vector source.
    pub fn stack(parts: Vec<TermSource>) -> Result<Self, SeriesError> {
        if parts.is_empty() {
            return Err(SeriesError::InvalidParameter("empty stack".into()));
        }
        Ok(TermSource::Stack(parts))
    }

    pub fn sum(parts: Vec<TermSource>) -> Result<Self, SeriesError> {
        let d = parts.first().map(|p| p.dim()).ok_or_else(|| SeriesError::InvalidParameter("empty sum".into()))?;
        if let Some(p) = parts.iter().find(|p| p.dim() != d) {
            return Err(SeriesError::DimensionMismatch { expected: d, found: p.dim() });
        }
        Ok(TermSource::Sum(parts))
    }

    pub fn dim(&self) -> usize {
        match self {
            TermSource::File(f) => f.dim,
            TermSource::Stack(parts) => parts.iter().map(|p| p.dim()).sum(),
            TermSource::Sum(parts) => parts[0].dim(),
            TermSource::Rule(r) => r.dim(),
            _ => 1,
        }
    }

    /// Scalar term; errors for vector sources.
    #[inline]
    pub fn scalar(&self, n: usize) -> Result<f64, SeriesError> {
        match self {
            TermSource::AltHarmonic => {
                let x = 1.0 / (n as f64 + 1.0);
                Ok(if n % 2 == 0 { x } else { -x })
            }
            TermSource::AltPower { alpha } => {
                let x = (n as f64 + 1.0).powf(-alpha);
                Ok(if n % 2 == 0 { x } else { -x })
            }
            TermSource::Harmonic => Ok(1.0 / (n as f64 + 1.0)),
            TermSource::Power { alpha } => Ok((n as f64 + 1.0).powf(-alpha)),
            TermSource::Zero => Ok(0.0),
            _ => {
                let d = self.dim();
                if d != 1 {
                    return Err(SeriesError::DimensionMismatch { expected: 1, found: d });
                }
                let mut out = [0.0];
                self.term_into(n, &mut out)?;
                Ok(out[0])
            }
        }
    }

    pub fn term(&self, n: usize) -> Result<Vec<f64>, SeriesError> {
        let mut out = vec![0.0; self.dim()];
        self.term_into(n, &mut out)?;
        Ok(out)
    }

    pub fn term_into(&self, n: usize, out: &mut [f64]) -> Result<(), SeriesError> {
        if out.len() != self.dim() {
            return Err(SeriesError::DimensionMismatch { expected: self.dim(), found: out.len() });
        }
        match self {
            TermSource::File(f) => f.term_into(n, out),
            TermSource::Stack(parts) => {
                let mut at = 0;
                for p in parts {
                    let d = p.dim();
                    p.term_into(n, &mut out[at..at + d])?;
                    at += d;
                }
                Ok(())
            }
            TermSource::Sum(parts) => {
                out.iter_mut().for_each(|x| *x = 0.0);
                let mut buf = vec![0.0; out.len()];
                for p in parts {
                    p.term_into(n, &mut buf)?;
                    for (o, b) in out.iter_mut().zip(&buf) {
                        *o += b;
                    }
                }
                Ok(())
            }
            TermSource::Rule(r) => r.term_into(n, out),
            _ => {
                out[0] = self.scalar(n)?;
                Ok(())
            }
        }
    }

    /// Euclidean norm of `term(n)`.
    pub fn magnitude(&self, n: usize) -> Result<f64, SeriesError> {
        if self.dim() == 1 {
            return Ok(self.scalar(n)?.abs());
        }
        Ok(self.term(n)?.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    pub fn describe(&self) -> String {
        match self {
            TermSource::AltHarmonic => "alt-harmonic".into(),
            TermSource::AltPower { alpha } => format!("alt-power:alpha={alpha}"),
            TermSource::Harmonic => "harmonic".into(),
            TermSource::Power { alpha } => format!("power:alpha={alpha}"),
            TermSource::Zero => "zero".into(),
            TermSource::File(f) => format!("file:path={},tail={}", f.origin, f.tail.describe()),
            TermSource::Stack(p) => format!("stack[{}]", p.iter().map(|s| s.describe()).collect::<Vec<_>>().join(" ; ")),
            TermSource::Sum(p) => format!("sum[{}]", p.iter().map(|s| s.describe()).collect::<Vec<_>>().join(" ; ")),
            TermSource::Rule(r) => r.describe(),
        }
    }
}

/// What a file-backed source does past its last line.
#[derive(Clone, Debug)]
pub enum Tail {
    /// Evaluating past the prefix is an error naming the index.
    None,
    Zero,
    /// Continue with the catalog source at the same index.
    Catalog(Box<TermSource>),
}

impl Tail {
    fn describe(&self) -> String {
        match self {
            Tail::None => "none".into(),
            Tail::Zero => "zero".into(),
            Tail::Catalog(s) => s.describe(),
        }
    }
}

/// Finite prefix of a (possibly vector) series, one line per index.
#[derive(Clone, Debug)]
pub struct FileSource {
    dim: usize,
    values: Vec<f64>,
    tail: Tail,
    origin: String,
}

impl FileSource {
    /// Parse `d` comma-separated decimals per line; blank lines are skipped.
    pub fn parse(text: &str, tail: Tail, origin: &str) -> Result<Self, SeriesError> {
        let mut dim = None;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| SeriesError::Parse { line: i + 1, message: e.to_string() })?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(SeriesError::Parse { line: i + 1, message: format!("expected {d} values, found {}", row.len()) })
                }
                _ => {}
            }
            values.extend(row);
        }
        let dim = dim.ok_or_else(|| SeriesError::Parse { line: 0, message: "no data lines".into() })?;
        if let Tail::Catalog(t) = &tail {
            if t.dim() != dim {
                return Err(SeriesError::DimensionMismatch { expected: dim, found: t.dim() });
            }
        }
        Ok(FileSource { dim, values, tail, origin: origin.to_string() })
    }

    pub fn load(path: &Path, tail: Tail) -> Result<Self, SeriesError> {
        let text = std::fs::read_to_string(path).map_err(|e| SeriesError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, tail, &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn term_into(&self, n: usize, out: &mut [f64]) -> Result<(), SeriesError> {
        if n < self.len() {
            out.copy_from_slice(&self.values[n * self.dim..(n + 1) * self.dim]);
            return Ok(());
        }
        match &self.tail {
            Tail::None => Err(SeriesError::MissingTerm { index: n, available: self.len() }),
            Tail::Zero => {
                out.iter_mut().for_each(|x| *x = 0.0);
                Ok(())
            }
            Tail::Catalog(s) => s.term_into(n, out),
        }
    }
}

impl From<FileSource> for TermSource {
    fn from(f: FileSource) -> Self {
        TermSource::File(Arc::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_terms() {
        let a = TermSource::AltHarmonic;
        assert_eq!(a.scalar(0).unwrap(), 1.0);
        assert_eq!(a.scalar(1).unwrap(), -0.5);
        assert_eq!(a.scalar(3).unwrap(), -0.25);
        let s = TermSource::alt_power(0.5).unwrap();
        assert_eq!(s.scalar(3).unwrap(), -0.5);
        assert!(TermSource::alt_power(0.0).is_err());
        assert_eq!(TermSource::Harmonic.scalar(4).unwrap(), 0.2);
    }

    #[test]
    fn stack_and_sum() {
        let v = TermSource::stack(vec![TermSource::AltHarmonic, TermSource::Harmonic]).unwrap();
        assert_eq!(v.dim(), 2);
        assert_eq!(v.term(1).unwrap(), vec![-0.5, 0.5]);
        assert!(v.scalar(1).is_err());
        let s = TermSource::sum(vec![TermSource::AltHarmonic, TermSource::Harmonic]).unwrap();
        assert_eq!(s.scalar(1).unwrap(), 0.0);
        assert_eq!(s.scalar(2).unwrap(), 2.0 / 3.0);
        assert!(TermSource::sum(vec![v, TermSource::Zero]).is_err());
    }

    #[test]
    fn file_source_with_tails() {
        let f = FileSource::parse("1.5\n-2\n\n0.25\n", Tail::None, "mem").unwrap();
        let s: TermSource = f.into();
        assert_eq!(s.scalar(2).unwrap(), 0.25);
        match s.scalar(3) {
            Err(SeriesError::MissingTerm { index, available }) => assert_eq!((index, available), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
        let z: TermSource = FileSource::parse("1\n", Tail::Zero, "mem").unwrap().into();
        assert_eq!(z.scalar(10).unwrap(), 0.0);
        let c: TermSource = FileSource::parse("7\n", Tail::Catalog(Box::new(TermSource::AltHarmonic)), "mem").unwrap().into();
        assert_eq!(c.scalar(0).unwrap(), 7.0);
        assert_eq!(c.scalar(1).unwrap(), -0.5);
    }

    #[test]
    fn file_source_rejects_ragged_rows() {
        assert!(FileSource::parse("1,2\n3\n", Tail::Zero, "mem").is_err());
        assert!(FileSource::parse("x\n", Tail::Zero, "mem").is_err());
        let v = FileSource::parse("1,2\n3,4\n", Tail::Zero, "mem").unwrap();
        assert_eq!(v.len(), 2);
        let s: TermSource = v.into();
        assert_eq!(s.term(1).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn terms_are_deterministic() {
        let s = TermSource::alt_power(0.6).unwrap();
        for n in [0usize, 17, 123_456] {
            assert_eq!(s.scalar(n).unwrap().to_bits(), s.scalar(n).unwrap().to_bits());
        }
    }
}
