//! Dense rectangular matrices over the real or complex field.
//!
//! One value type serves both fields: entries are stored as [`Complex64`] and
//! a [`Field`] tag records whether imaginary parts are admitted. Construction
//! validates shape, finiteness, and the real-field constraint, so no partially
//! valid matrix escapes this module.
//!
//! The JSON interchange format is
//! `{"rows":m,"cols":n,"field":"real"|"complex","data":[[..],..]}` with `data`
//! holding `rows` arrays of `cols` entries; an entry is a plain number in the
//! real field and a two-element `[re, im]` array in the complex field. Parsing
//! is exact for IEEE-754 doubles and `parse(serialize(m)) == m` at the bit
//! level.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Scalar field tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Field {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, MatrixError> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(MatrixError::Schema(format!(
                "unknown field {other:?}, expected \"real\" or \"complex\""
            ))),
        }
    }
}

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("invalid matrix schema: {0}")]
    Schema(String),
    #[error("rows and cols must be at least 1, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("data has {actual} rows, expected {expected}")]
    RowCount { expected: usize, actual: usize },
    #[error("row {row} has {actual} entries, expected {expected}")]
    RowLength { row: usize, expected: usize, actual: usize },
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("nonzero imaginary part at ({row},{col}) in a real-field matrix")]
    ImaginaryInRealField { row: usize, col: usize },
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
}

/// Dense row-major matrix with a field tag.
///
/// Invariants, enforced at construction: `rows >= 1`, `cols >= 1`,
/// `data.len() == rows * cols`, every entry finite, and `im == 0` for every
/// entry when `field` is [`Field::Real`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixF {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Complex64>,
}

impl MatrixF {
    pub fn new(
        rows: usize,
        cols: usize,
        field: Field,
        data: Vec<Complex64>,
    ) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension { rows, cols });
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| MatrixError::Schema(format!("{rows}x{cols} overflows")))?;
        if data.len() != expected {
            return Err(MatrixError::RowCount {
                expected,
                actual: data.len(),
            });
        }
        for (idx, z) in data.iter().enumerate() {
            let (row, col) = (idx / cols, idx % cols);
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(MatrixError::NonFinite { row, col });
            }
            if field == Field::Real && z.im != 0.0 {
                return Err(MatrixError::ImaginaryInRealField { row, col });
            }
        }
        Ok(MatrixF {
            rows,
            cols,
            field,
            data,
        })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, MatrixError> {
        let data = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(rows, cols, Field::Real, data)
    }

    pub fn from_complex(
        rows: usize,
        cols: usize,
        data: Vec<Complex64>,
    ) -> Result<Self, MatrixError> {
        Self::new(rows, cols, Field::Complex, data)
    }

    /// Square diagonal matrix over the reals.
    pub fn diag_real(diag: &[f64]) -> Result<Self, MatrixError> {
        let n = diag.len();
        if n == 0 {
            return Err(MatrixError::ZeroDimension { rows: 0, cols: 0 });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = Complex64::new(d, 0.0);
        }
        Self::new(n, n, Field::Real, data)
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Result<Self, MatrixError> {
        Self::new(rows, cols, field, vec![Complex64::new(0.0, 0.0); rows.checked_mul(cols).unwrap_or(0)])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn min_dim(&self) -> usize {
        self.rows.min(self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Entry at (row, col), zero-based. Panics when out of range.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.rows && col < self.cols, "index out of range");
        self.data[row * self.cols + col]
    }

    pub fn same_shape(&self, other: &MatrixF) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Entrywise negation. Exact: σ_i(-M) = σ_i(M).
    pub fn negated(&self) -> MatrixF {
        MatrixF {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            data: self.data.iter().map(|z| -z).collect(),
        }
    }

    /// Conjugate transpose; plain transpose over the reals.
    pub fn conj_transpose(&self) -> MatrixF {
        let mut data = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        MatrixF {
            rows: self.cols,
            cols: self.rows,
            field: self.field,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        // Scale by the largest component so squares can neither overflow
        // nor vanish for extreme inputs.
        let scale = self
            .data
            .iter()
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0f64, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let sum: f64 = self
            .data
            .iter()
            .map(|z| {
                let re = z.re / scale;
                let im = z.im / scale;
                re * re + im * im
            })
            .sum();
        scale * sum.sqrt()
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &MatrixF) -> Result<MatrixF, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::ShapeMismatch(
                self.rows, self.cols, rhs.rows, rhs.cols,
            ));
        }
        let field = if self.field == Field::Real && rhs.field == Field::Real {
            Field::Real
        } else {
            Field::Complex
        };
        let mut data = vec![Complex64::new(0.0, 0.0); self.rows * rhs.cols];
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..self.cols {
                    acc += self.data[r * self.cols + j] * rhs.data[j * rhs.cols + c];
                }
                data[r * rhs.cols + c] = acc;
            }
        }
        Ok(MatrixF {
            rows: self.rows,
            cols: rhs.cols,
            field,
            data,
        })
    }

    /// Parse the JSON interchange format.
    pub fn from_json(text: &[u8]) -> Result<Self, MatrixError> {
        let raw: RawMatrix = match serde_json::from_slice(text) {
            Ok(raw) => raw,
            Err(e) => {
                return Err(match e.classify() {
                    serde_json::error::Category::Data => MatrixError::Schema(e.to_string()),
                    _ => MatrixError::MalformedJson(e.to_string()),
                })
            }
        };
        raw.validate()
    }

    /// Serialize to the JSON interchange format (single line).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }
}

/// Parse a matrix from its JSON interchange form.
pub fn parse_matrix(text: &[u8]) -> Result<MatrixF, MatrixError> {
    MatrixF::from_json(text)
}

struct EntrySer(Complex64, Field);

impl Serialize for EntrySer {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.1 {
            Field::Real => serializer.serialize_f64(self.0.re),
            Field::Complex => {
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(&self.0.re)?;
                seq.serialize_element(&self.0.im)?;
                seq.end()
            }
        }
    }
}

struct RowSer<'a>(&'a [Complex64], Field);

impl Serialize for RowSer<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for &z in self.0 {
            seq.serialize_element(&EntrySer(z, self.1))?;
        }
        seq.end()
    }
}

struct DataSer<'a>(&'a MatrixF);

impl Serialize for DataSer<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let m = self.0;
        let mut seq = serializer.serialize_seq(Some(m.rows))?;
        for r in 0..m.rows {
            seq.serialize_element(&RowSer(&m.data[r * m.cols..(r + 1) * m.cols], m.field))?;
        }
        seq.end()
    }
}

impl Serialize for MatrixF {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("MatrixF", 4)?;
        st.serialize_field("rows", &(self.rows as u64))?;
        st.serialize_field("cols", &(self.cols as u64))?;
        st.serialize_field("field", &self.field)?;
        st.serialize_field("data", &DataSer(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for MatrixF {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(deserializer)?;
        raw.validate().map_err(serde::de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    rows: u64,
    cols: u64,
    field: Field,
    data: Vec<Vec<serde_json::Value>>,
}

impl RawMatrix {
    fn validate(self) -> Result<MatrixF, MatrixError> {
        let rows = usize::try_from(self.rows)
            .map_err(|_| MatrixError::Schema(format!("rows {} too large", self.rows)))?;
        let cols = usize::try_from(self.cols)
            .map_err(|_| MatrixError::Schema(format!("cols {} too large", self.cols)))?;
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension { rows, cols });
        }
        let total = rows
            .checked_mul(cols)
            .ok_or_else(|| MatrixError::Schema(format!("{rows}x{cols} overflows")))?;
        if self.data.len() != rows {
            return Err(MatrixError::RowCount {
                expected: rows,
                actual: self.data.len(),
            });
        }
        let mut data = Vec::with_capacity(total);
        for (r, row) in self.data.iter().enumerate() {
            if row.len() != cols {
                return Err(MatrixError::RowLength {
                    row: r,
                    expected: cols,
                    actual: row.len(),
                });
            }
            for (c, entry) in row.iter().enumerate() {
                data.push(decode_entry(entry, self.field, r, c)?);
            }
        }
        MatrixF::new(rows, cols, self.field, data)
    }
}

fn as_finite_f64(v: &serde_json::Value, row: usize, col: usize) -> Result<f64, MatrixError> {
    let x = v
        .as_f64()
        .ok_or_else(|| MatrixError::Schema(format!("entry ({row},{col}) is not a number")))?;
    if !x.is_finite() {
        return Err(MatrixError::NonFinite { row, col });
    }
    Ok(x)
}

fn decode_entry(
    v: &serde_json::Value,
    field: Field,
    row: usize,
    col: usize,
) -> Result<Complex64, MatrixError> {
    match (field, v) {
        (Field::Real, serde_json::Value::Number(_)) => {
            Ok(Complex64::new(as_finite_f64(v, row, col)?, 0.0))
        }
        (Field::Real, serde_json::Value::Array(parts)) if parts.len() == 2 => {
            // A [re, im] pair under field=real: distinguish a stray nonzero
            // imaginary part from a plain encoding mistake.
            let im = as_finite_f64(&parts[1], row, col)?;
            if im != 0.0 {
                Err(MatrixError::ImaginaryInRealField { row, col })
            } else {
                Err(MatrixError::Schema(format!(
                    "entry ({row},{col}) must be a plain number in the real field"
                )))
            }
        }
        (Field::Complex, serde_json::Value::Array(parts)) if parts.len() == 2 => {
            let re = as_finite_f64(&parts[0], row, col)?;
            let im = as_finite_f64(&parts[1], row, col)?;
            Ok(Complex64::new(re, im))
        }
        (Field::Complex, _) => Err(MatrixError::Schema(format!(
            "entry ({row},{col}) must be a [re, im] pair in the complex field"
        ))),
        (Field::Real, _) => Err(MatrixError::Schema(format!(
            "entry ({row},{col}) must be a number in the real field"
        ))),
    }
}

/// A shape- and field-matched pair (A, B), the operand of every bound.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPair {
    a: MatrixF,
    b: MatrixF,
}

impl MatrixPair {
    pub fn new(a: MatrixF, b: MatrixF) -> Result<Self, MatrixError> {
        if !a.same_shape(&b) {
            return Err(MatrixError::ShapeMismatch(a.rows, a.cols, b.rows, b.cols));
        }
        if a.field != b.field {
            return Err(MatrixError::FieldMismatch(a.field, b.field));
        }
        Ok(MatrixPair { a, b })
    }

    pub fn a(&self) -> &MatrixF {
        &self.a
    }

    pub fn b(&self) -> &MatrixF {
        &self.b
    }

    pub fn rows(&self) -> usize {
        self.a.rows
    }

    pub fn cols(&self) -> usize {
        self.a.cols
    }

    pub fn min_dim(&self) -> usize {
        self.a.min_dim()
    }

    pub fn is_square(&self) -> bool {
        self.a.is_square()
    }

    pub fn field(&self) -> Field {
        self.a.field
    }

    /// Entrywise sum A + B.
    pub fn sum(&self) -> MatrixF {
        self.zip_with(|x, y| x + y)
    }

    /// Entrywise difference A - B.
    pub fn difference(&self) -> MatrixF {
        self.zip_with(|x, y| x - y)
    }

    fn zip_with(&self, f: impl Fn(Complex64, Complex64) -> Complex64) -> MatrixF {
        MatrixF {
            rows: self.a.rows,
            cols: self.a.cols,
            field: self.a.field,
            data: self
                .a
                .data
                .iter()
                .zip(&self.b.data)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        }
    }
}
