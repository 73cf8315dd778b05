//! Sparse matrices over the rationals with exact rank and kernel.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

type Row = Vec<(usize, Rational)>;

/// Row-major sparse matrix; each row keeps its nonzero entries sorted by
/// column.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Row>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].push((i, Rational::one()));
        }
        m
    }

    /// Sums duplicate entries and drops zeros.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); nrows];
        for (r, c, v) in entries {
            assert!(r < nrows && c < ncols, "entry ({r},{c}) outside {nrows}x{ncols}");
            *acc[r].entry(c).or_insert_with(Rational::zero) += v;
        }
        Self {
            nrows,
            ncols,
            rows: acc
                .into_iter()
                .map(|row| row.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        Self::from_triplets(
            rows.len(),
            ncols,
            rows.iter().enumerate().flat_map(|(r, row)| {
                assert_eq!(row.len(), ncols, "ragged dense matrix");
                row.iter().enumerate().map(move |(c, &v)| (r, c, rational(v)))
            }),
        )
    }

    /// A 0/1 matrix whose row `r` picks input coordinate `pick[r]` (or is zero).
    pub fn selection(ncols: usize, pick: &[Option<usize>]) -> Self {
        Self::from_triplets(
            pick.len(),
            ncols,
            pick.iter()
                .enumerate()
                .filter_map(|(r, c)| c.map(|c| (r, c, Rational::one()))),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.rows[r]
            .binary_search_by_key(&c, |(col, _)| *col)
            .map_or_else(|_| Rational::zero(), |i| self.rows[r][i].1.clone())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, c.to_owned(), v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.ncols]; self.nrows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zeros(self.nrows, self.ncols);
        }
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(c, v)| (*c, v * k)).collect())
                .collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, rhs.nrows, "shape mismatch in product");
        let mut entries = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &rhs.rows[*k] {
                    *acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                }
            }
            entries.extend(acc.into_iter().map(|(c, v)| (r, c, v)));
        }
        Self::from_triplets(self.nrows, rhs.ncols, entries)
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.ncols, "vector length mismatch");
        self.rows
            .iter()
            .map(|row| row.iter().fold(Rational::zero(), |acc, (c, v)| acc + v * &x[*c]))
            .collect()
    }

    /// Places `block` with its top-left corner at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &SparseMatrix) {
        assert!(r0 + block.nrows <= self.nrows && c0 + block.ncols <= self.ncols);
        for (r, row) in block.rows.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            let merged = merge_axpy(&self.rows[r0 + r], &Rational::one(), &shift(row, c0));
            self.rows[r0 + r] = merged;
        }
    }

    pub fn rank(&self) -> usize {
        Echelon::of_rows(self.rows.iter().cloned()).rank()
    }

    /// Basis of `{x : self * x = 0}` in reduced row echelon form.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let echelon = Echelon::of_rows(self.rows.iter().cloned()).reduced();
        let pivots: BTreeMap<usize, &Row> = echelon.pivots.iter().map(|(c, r)| (*c, r)).collect();
        let basis: Vec<Vec<Rational>> = (0..self.ncols)
            .filter(|c| !pivots.contains_key(c))
            .map(|free| {
                let mut v = vec![Rational::zero(); self.ncols];
                v[free] = Rational::one();
                for (&p, row) in &pivots {
                    if let Ok(i) = row.binary_search_by_key(&free, |(c, _)| *c) {
                        v[p] = -row[i].1.clone();
                    }
                }
                v
            })
            .collect();
        row_reduce(&basis)
    }

    /// Writes one `row col num/den` line per nonzero entry.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# {} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(out, "{r} {c} {}/{}", v.numer(), v.denom())?;
        }
        Ok(())
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{} [", self.nrows, self.ncols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form of the span of `vectors`, zero rows dropped.
pub fn row_reduce(vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let Some(width) = vectors.first().map(Vec::len) else {
        return Vec::new();
    };
    let rows = vectors.iter().map(|v| {
        v.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(c, x)| (c, x.clone()))
            .collect::<Row>()
    });
    Echelon::of_rows(rows)
        .reduced()
        .pivots
        .into_values()
        .map(|row| {
            let mut dense = vec![Rational::zero(); width];
            for (c, x) in row {
                dense[c] = x;
            }
            dense
        })
        .collect()
}

/// Pivot rows keyed by leading column, each normalised to a leading 1.
struct Echelon {
    pivots: BTreeMap<usize, Row>,
}

impl Echelon {
    fn of_rows(rows: impl IntoIterator<Item = Row>) -> Self {
        let mut pivots: BTreeMap<usize, Row> = BTreeMap::new();
        for mut row in rows {
            while let Some((lead, coef)) = row.first().cloned() {
                match pivots.get(&lead) {
                    Some(p) => row = merge_axpy(&row, &-coef, p),
                    None => {
                        let inv = coef.recip();
                        for (_, v) in row.iter_mut() {
                            *v *= &inv;
                        }
                        pivots.insert(lead, row);
                        break;
                    }
                }
            }
        }
        Self { pivots }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Clears every pivot column above and below its pivot.
    fn reduced(mut self) -> Self {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for &p in &cols {
            let pivot_row = self.pivots[&p].clone();
            for (_, row) in self.pivots.range_mut(..p) {
                if let Ok(i) = row.binary_search_by_key(&p, |(c, _)| *c) {
                    let coef = row[i].1.clone();
                    *row = merge_axpy(row, &-coef, &pivot_row);
                }
            }
        }
        self
    }
}

/// `a + k * b` for sorted sparse rows.
fn merge_axpy(a: &[(usize, Rational)], k: &Rational, b: &[(usize, Rational)]) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, k * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + k * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn shift(row: &[(usize, Rational)], by: usize) -> Row {
    row.iter().map(|(c, v)| (c + by, v.clone())).collect()
}
