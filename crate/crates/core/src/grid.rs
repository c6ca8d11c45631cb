//! Nonnegative functions on discrete cubes `{0,…,m}^d` and their convolutions.
//!
//! Tables are dense and row-major with the first coordinate varying slowest,
//! so the flat index of `(x_1, …, x_d)` is `Σ x_t (m+1)^(d-t)`. For `m = 1`
//! this is the bitmask with `x_1` as the most significant bit.

use std::fmt::Write as _;



use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar, Weight};

/// Upper bound on the number of entries of any table.
pub const MAX_ENTRIES: usize = 1 << 26;

fn table_len(d: usize, m: usize) -> Result<usize> {
    let side = (m as u128) + 1;
    let mut entries: u128 = 1;
    for _ in 0..d {
        entries = entries.saturating_mul(side);
        if entries > MAX_ENTRIES as u128 {
            return Err(Error::MemoryCap { entries, cap: MAX_ENTRIES });
        }
    }
    Ok(entries as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFn<T> {
    d: usize,
    m: usize,
    values: Vec<T>,
}

impl<T: Weight> GridFn<T> {
    /// Builds a table, rejecting negative entries (and NaN for floats).
    pub fn new(d: usize, m: usize, values: Vec<T>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension d must be at least 1"));
        }
        let len = table_len(d, m)?;
        if values.len() != len {
            return Err(Error::invalid(format!(
                "expected {len} values for d={d}, m={m}, got {}",
                values.len()
            )));
        }
        let zero = T::zero();
        if let Some(index) = values.iter().position(|v| !(*v >= zero)) {
            return Err(Error::NegativeValue { index });
        }
        Ok(GridFn { d, m, values })
    }

    /// One-dimensional table `(v_0, …, v_m)`.
    pub fn from_slice(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("one-dimensional table"));
        }
        Self::new(1, values.len() - 1, values.to_vec())
    }

    pub fn zeros(d: usize, m: usize) -> Result<Self> {
        let len = table_len(d, m)?;
        Self::new(d, m, vec![T::zero(); len])
    }

    pub fn from_fn(d: usize, m: usize, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let len = table_len(d, m)?;
        let mut point = vec![0; d];
        let mut values = Vec::with_capacity(len);
        for idx in 0..len {
            decode(idx, d, m, &mut point);
            values.push(f(&point));
        }
        Self::new(d, m, values)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn index_of(&self, point: &[usize]) -> Option<usize> {
        if point.len() != self.d || point.iter().any(|&x| x > self.m) {
            return None;
        }
        Some(point.iter().fold(0, |acc, &x| acc * (self.m + 1) + x))
    }

    pub fn point_of(&self, index: usize) -> Vec<usize> {
        let mut point = vec![0; self.d];
        decode(index, self.d, self.m, &mut point);
        point
    }

    pub fn get(&self, point: &[usize]) -> Option<&T> {
        self.index_of(point).map(|i| &self.values[i])
    }

    /// `(f ∗ g)(x) = Σ_{y+z=x} f(y) g(z)`, supported on `{0,…,m_f+m_g}^d`.
    pub fn convolve(&self, other: &GridFn<T>) -> Result<GridFn<T>> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch { left: self.d, right: other.d });
        }
        let d = self.d;
        let m = self.m + other.m;
        let len = table_len(d, m)?;
        // Output index is linear in coordinates, so each input index maps to
        // a fixed offset in the output table.
        let offsets = |f: &GridFn<T>| -> Vec<usize> {
            let mut point = vec![0; d];
            (0..f.values.len())
                .map(|i| {
                    decode(i, d, f.m, &mut point);
                    point.iter().fold(0, |acc, &x| acc * (m + 1) + x)
                })
                .collect()
        };
        let off_f = offsets(self);
        let off_g = offsets(other);
        let mut out = vec![T::zero(); len];
        for (a, fa) in self.values.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (b, gb) in other.values.iter().enumerate() {
                if gb.is_zero() {
                    continue;
                }
                let slot = &mut out[off_f[a] + off_g[b]];
                *slot = std::mem::replace(slot, T::zero()) + fa.clone() * gb.clone();
            }
        }
        Ok(GridFn { d, m, values: out })
    }

    pub fn l1_norm(&self) -> T {
        self.values.iter().cloned().fold(T::zero(), |acc, v| acc + v)
    }

    /// Maximum entry; entries are nonnegative so this is the sup norm.
    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| if *v > acc { v.clone() } else { acc })
    }

    /// Flat indices of all entries equal to the maximum.
    pub fn argmax(&self) -> Vec<usize> {
        let sup = self.sup_norm();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == sup)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn scale(&self, c: &T) -> Result<GridFn<T>> {
        GridFn::new(self.d, self.m, self.values.iter().map(|v| v.clone() * c.clone()).collect())
    }
}

fn decode(mut index: usize, d: usize, m: usize, point: &mut [usize]) {
    for t in (0..d).rev() {
        point[t] = index % (m + 1);
        index /= m + 1;
    }
}

/// Left fold of [`GridFn::convolve`].
pub fn convolve_many<T: Weight>(fs: &[GridFn<T>]) -> Result<GridFn<T>> {
    let (first, rest) = fs.split_first().ok_or(Error::Empty("list of factors"))?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.convolve(f))
}

/// `‖f_1 ∗ … ∗ f_k‖_∞ / Π ‖f_i‖_1`.
pub fn ratio<T: Scalar>(fs: &[GridFn<T>]) -> Result<T> {
    if fs.is_empty() {
        return Err(Error::Empty("list of factors"));
    }
    let mut mass = T::one();
    for (index, f) in fs.iter().enumerate() {
        let n = f.l1_norm();
        if n.is_zero() {
            return Err(Error::ZeroMassInput { index });
        }
        mass = mass * n;
    }
    Ok(convolve_many(fs)?.sup_norm() / mass)
}

/// `F(x_1,…,x_d) = Π_t h_t(x_t)` for one-dimensional `h_t` of equal side.
pub fn product_function<T: Scalar>(axes: &[GridFn<T>]) -> Result<GridFn<T>> {
    let first = axes.first().ok_or(Error::Empty("list of axes"))?;
    let m = first.m;
    for h in axes {
        if h.d != 1 {
            return Err(Error::DimensionMismatch { left: 1, right: h.d });
        }
        if h.m != m {
            return Err(Error::SideMismatch { left: m, right: h.m });
        }
    }
    GridFn::from_fn(axes.len(), m, |x| {
        axes.iter()
            .zip(x)
            .fold(T::one(), |acc, (h, &xt)| acc * h.values[xt].clone())
    })
}

/// Reads the text table format: a `d m` header followed by `(m+1)^d`
/// rational literals in row-major order. Lines starting with `#` and blank
/// lines are ignored; several values may share a line.
pub fn parse_grid(text: &str) -> Result<GridFn<Rational>> {
    let mut header: Option<(usize, usize)> = None;
    let mut values = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
        if header.is_none() {
            let mut it = line.split_whitespace();
            let mut next = |name: &str| -> Result<usize> {
                it.next()
                    .ok_or_else(|| parse_err(format!("missing {name} in header")))?
                    .parse()
                    .map_err(|_| parse_err(format!("bad {name} in header")))
            };
            let d = next("d")?;
            let m = next("m")?;
            header = Some((d, m));
            continue;
        }
        for tok in line.split_whitespace() {
            values.push(parse_rational(tok).map_err(|e| parse_err(e.to_string()))?);
        }
    }
    let (d, m) = header.ok_or(Error::Parse { line: 0, message: "missing header".into() })?;
    GridFn::new(d, m, values)
}

pub fn format_grid(f: &GridFn<Rational>) -> String {
    let mut out = format!("{} {}\n", f.d, f.m);
    for v in &f.values {
        let _ = writeln!(out, "{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn q(v: &[i64]) -> GridFn<Rational> {
        GridFn::from_slice(&v.iter().map(|&x| rational(x, 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn convolve_examples() {
        assert_eq!(q(&[2, 1]).convolve(&q(&[2, 1])).unwrap(), q(&[4, 4, 1]));
        assert_eq!(q(&[1, 1]).convolve(&q(&[1, 1])).unwrap(), q(&[1, 2, 1]));
    }

    #[test]
    fn delta_at_origin_is_identity() {
        let g = GridFn::<Rational>::from_fn(2, 2, |x| rational((x[0] * 3 + x[1] + 1) as i64, 7)).unwrap();
        let delta = GridFn::<Rational>::from_fn(2, 0, |_| rational(1, 1)).unwrap();
        assert_eq!(delta.convolve(&g).unwrap(), g);
    }

    #[test]
    fn convolve_many_examples() {
        assert_eq!(convolve_many(&[q(&[1, 1]), q(&[1, 1]), q(&[1, 1])]).unwrap(), q(&[1, 3, 3, 1]));
        assert_eq!(convolve_many(&[q(&[2, 1])]).unwrap(), q(&[2, 1]));
        assert_eq!(convolve_many(&[q(&[2, 1]), q(&[2, 1])]).unwrap(), q(&[4, 4, 1]));
        assert_eq!(convolve_many::<Rational>(&[]), Err(Error::Empty("list of factors")));
    }

    #[test]
    fn norms() {
        assert_eq!(q(&[2, 1]).l1_norm(), rational(3, 1));
        assert_eq!(q(&[2, 1]).sup_norm(), rational(2, 1));
        assert_eq!(q(&[4, 4, 1]).l1_norm(), rational(9, 1));
        assert_eq!(q(&[4, 4, 1]).sup_norm(), rational(4, 1));
        assert_eq!(q(&[0, 0]).l1_norm(), rational(0, 1));
        assert_eq!(q(&[0, 0]).sup_norm(), rational(0, 1));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio(&[q(&[2, 1]), q(&[2, 1])]).unwrap(), rational(4, 9));
        assert_eq!(ratio(&[q(&[1, 1]), q(&[1, 1]), q(&[1, 1])]).unwrap(), rational(3, 8));
        assert_eq!(ratio(&[q(&[0, 5]), q(&[3, 0])]).unwrap(), rational(1, 1));
        assert_eq!(ratio(&[q(&[1, 1]), q(&[0, 0])]), Err(Error::ZeroMassInput { index: 1 }));
    }

    #[test]
    fn product_function_examples() {
        let p = product_function(&[q(&[2, 1]), q(&[2, 1])]).unwrap();
        assert_eq!(p.values(), &[rational(4, 1), rational(2, 1), rational(2, 1), rational(1, 1)]);
        assert_eq!(product_function(&[q(&[1, 1])]).unwrap(), q(&[1, 1]));
        let delta = product_function(&[q(&[1, 0]), q(&[0, 1])]).unwrap();
        assert_eq!(delta.argmax(), vec![delta.index_of(&[0, 1]).unwrap()]);
        assert_eq!(delta.l1_norm(), rational(1, 1));
        assert!(matches!(product_function(&[q(&[1, 1]), q(&[1, 1, 1])]), Err(Error::SideMismatch { .. })));
        assert!(matches!(product_function::<Rational>(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(GridFn::from_slice(&[1.0, -0.5]), Err(Error::NegativeValue { index: 1 }));
        assert_eq!(GridFn::from_slice(&[f64::NAN]), Err(Error::NegativeValue { index: 0 }));
        assert!(matches!(GridFn::<f64>::zeros(27, 1), Err(Error::MemoryCap { .. })));
        assert!(GridFn::<f64>::zeros(26, 1).is_ok());
        let a = GridFn::<f64>::zeros(1, 1).unwrap();
        let b = GridFn::<f64>::zeros(2, 1).unwrap();
        assert_eq!(a.convolve(&b), Err(Error::DimensionMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn row_major_first_coordinate_slowest() {
        let f = GridFn::<u64>::from_fn(3, 1, |x| (x[0] * 4 + x[1] * 2 + x[2]) as u64).unwrap();
        assert_eq!(f.values(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(f.point_of(6), vec![1, 1, 0]);
    }

    #[test]
    fn text_format_round_trip() {
        let text = "# extremal k=4 d=2\n2 1\n9\n6\n# mid comment\n6\n4\n";
        let f = parse_grid(text).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.values()[1], rational(6, 1));
        assert_eq!(parse_grid(&format_grid(&f)).unwrap(), f);
        let g = parse_grid("1 2\n1/2 1/3 0.25\n").unwrap();
        assert_eq!(g.values()[2], rational(1, 4));
        assert!(matches!(parse_grid("1 1\n1\n"), Err(Error::InvalidArgument(_))));
        assert!(matches!(parse_grid("1 1\n1\nx\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_grid("1 1\n-1\n1\n"), Err(Error::NegativeValue { index: 0 })));
    }
}
