//! Thickness maps: CSV lattices and whitelisted closed-form expressions.
//!
//! CSV maps carry the header `y1,y2,H` and list a rectangular lattice in
//! row-major order (`y1` varies fastest). Expressions are limited to
//! arithmetic in `y1`, `y2`, numeric constants, `pi`, non-negative integer
//! powers and the functions `sin`, `cos`, `exp`.

use std::fmt;
use std::path::Path;

use meval::tokenizer::{Operation, Token};
use meval::{ContextProvider, Expr, FuncEvalError};

use crate::error::{Error, Result};
use crate::field::SmoothField;
use crate::geometry::{EllipseDomain, Point};
use crate::grid::{DiskGrid, ScalarField};

/// Rectangular lattice map with bilinear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeMap {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<f64>,
}

impl LatticeMap {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if xs.len() < 2 || ys.len() < 2 || !sorted(&xs) || !sorted(&ys) {
            return Err(Error::Shape(
                "lattice axes need at least two strictly increasing coordinates".into(),
            ));
        }
        if values.len() != xs.len() * ys.len() {
            return Err(Error::Shape(format!(
                "lattice {}x{} needs {} values, got {}",
                xs.len(),
                ys.len(),
                xs.len() * ys.len(),
                values.len()
            )));
        }
        Ok(Self { xs, ys, values })
    }

    /// Reads a `y1,y2,<column>` CSV lattice.
    pub fn read_csv(path: impl AsRef<Path>, column: &str) -> Result<Self> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let ingest = |message: String| Error::Ingest {
            path: display.clone(),
            message,
        };
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: display.clone(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers = reader.headers().map_err(|e| ingest(e.to_string()))?.clone();
        let expected = ["y1", "y2", column];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(a, b)| a != b) {
            return Err(ingest(format!(
                "expected header `y1,y2,{column}`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| ingest(e.to_string()))?;
            let mut row = [0.0f64; 3];
            for (c, slot) in row.iter_mut().enumerate() {
                let field = record.get(c).unwrap_or("");
                *slot = field.parse().map_err(|_| {
                    ingest(format!("line {}: cannot parse `{field}` as a number", line + 2))
                })?;
                if !slot.is_finite() {
                    return Err(ingest(format!("line {}: non-finite value", line + 2)));
                }
            }
            rows.push(row);
        }
        Self::from_rows(&rows).map_err(|e| ingest(e.to_string()))
    }

    /// Builds the lattice from row-major `(y1, y2, value)` triples.
    pub fn from_rows(rows: &[[f64; 3]]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Shape("empty lattice".into()));
        };
        let nx = rows.iter().take_while(|r| r[1] == first[1]).count();
        if nx == 0 || !rows.len().is_multiple_of(nx) {
            return Err(Error::Shape("rows do not form a rectangular lattice".into()));
        }
        let ny = rows.len() / nx;
        let xs: Vec<f64> = rows[..nx].iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = (0..ny).map(|j| rows[j * nx][1]).collect();
        for (k, r) in rows.iter().enumerate() {
            let (i, j) = (k % nx, k / nx);
            if r[0] != xs[i] || r[1] != ys[j] {
                return Err(Error::Shape(format!(
                    "row {} at ({}, {}) breaks the row-major lattice",
                    k + 1,
                    r[0],
                    r[1]
                )));
            }
        }
        Self::new(xs, ys, rows.iter().map(|r| r[2]).collect())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Reinterprets the lattice as a grid field; the lattice must coincide
    /// with the mapped lattice of `grid` on `domain`.
    pub fn to_scalar_field(&self, domain: EllipseDomain, grid: DiskGrid) -> Result<ScalarField> {
        let side = grid.side();
        if self.xs.len() != side || self.ys.len() != side {
            return Err(Error::Shape(format!(
                "map lattice is {}x{}, solver lattice is {side}x{side}",
                self.xs.len(),
                self.ys.len()
            )));
        }
        let tol = 1e-6 * grid.spacing();
        for i in 0..side {
            let (x, y) = (domain.a1 * grid.xi(i), domain.a2 * grid.xi(i));
            if (self.xs[i] - x).abs() > tol * domain.a1 || (self.ys[i] - y).abs() > tol * domain.a2 {
                return Err(Error::Shape(format!(
                    "map lattice node {i} at ({}, {}) does not match solver node ({x}, {y})",
                    self.xs[i], self.ys[i]
                )));
            }
        }
        ScalarField::from_values(domain, grid, self.values.clone())
    }

    fn locate(axis: &[f64], x: f64) -> (usize, f64) {
        let n = axis.len();
        let x = x.clamp(axis[0], axis[n - 1]);
        let i = axis.partition_point(|&a| a <= x).clamp(1, n - 1) - 1;
        (i, (x - axis[i]) / (axis[i + 1] - axis[i]))
    }
}

impl SmoothField for LatticeMap {
    fn value(&self, y: Point) -> f64 {
        let (i, tx) = Self::locate(&self.xs, y[0]);
        let (j, ty) = Self::locate(&self.ys, y[1]);
        let nx = self.xs.len();
        let v = |a: usize, b: usize| self.values[b * nx + a];
        (1.0 - tx) * (1.0 - ty) * v(i, j)
            + tx * (1.0 - ty) * v(i + 1, j)
            + (1.0 - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1)
    }

    fn length_scale(&self) -> f64 {
        let dx = self.xs[1] - self.xs[0];
        let dy = self.ys[1] - self.ys[0];
        // finite differences must stay inside one lattice cell
        dx.min(dy) * 10.0
    }
}

/// Closed-form field parsed from a whitelisted expression in `y1`, `y2`.
#[derive(Clone)]
pub struct ExprField {
    source: String,
    expr: Expr,
    scale: f64,
}

const FUNCTIONS: [&str; 3] = ["sin", "cos", "exp"];

impl ExprField {
    pub fn parse(source: &str) -> Result<Self> {
        let expr: Expr = source
            .parse()
            .map_err(|e| Error::Expression(format!("`{source}`: {e}")))?;
        let tokens: &[Token] = &expr;
        for (k, token) in tokens.iter().enumerate() {
            match token {
                Token::Var(name) if matches!(name.as_str(), "y1" | "y2" | "pi") => {}
                Token::Var(name) => {
                    return Err(Error::Expression(format!(
                        "`{source}`: unknown variable `{name}` (allowed: y1, y2, pi)"
                    )))
                }
                Token::Func(name, arity) => {
                    if !FUNCTIONS.contains(&name.as_str()) || *arity != Some(1) {
                        return Err(Error::Expression(format!(
                            "`{source}`: function `{name}` is not allowed (allowed: sin, cos, exp)"
                        )));
                    }
                }
                Token::Binary(Operation::Pow) => {
                    let ok = matches!(tokens.get(k.wrapping_sub(1)),
                        Some(Token::Number(n)) if *n >= 0.0 && n.fract() == 0.0 && k > 0);
                    if !ok {
                        return Err(Error::Expression(format!(
                            "`{source}`: exponents must be non-negative integer literals"
                        )));
                    }
                }
                Token::Binary(Operation::Rem) => {
                    return Err(Error::Expression(format!(
                        "`{source}`: operator not allowed"
                    )))
                }
                _ => {}
            }
        }
        let field = Self {
            source: source.to_string(),
            expr,
            scale: 1.0,
        };
        // surfaces arity or evaluation problems at parse time
        field.try_eval([0.0, 0.0])?;
        Ok(field)
    }

    /// Sets the length scale used for finite-difference derivatives.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn try_eval(&self, y: Point) -> Result<f64> {
        self.expr
            .eval_with_context(PointContext(y))
            .map_err(|e| Error::Expression(format!("`{}`: {e}", self.source)))
    }
}

impl fmt::Debug for ExprField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ExprField").field(&self.source).finish()
    }
}

impl SmoothField for ExprField {
    fn value(&self, y: Point) -> f64 {
        self.try_eval(y).unwrap_or(f64::NAN)
    }

    fn length_scale(&self) -> f64 {
        self.scale
    }
}

struct PointContext(Point);

impl ContextProvider for PointContext {
    fn get_var(&self, name: &str) -> Option<f64> {
        match name {
            "y1" => Some(self.0[0]),
            "y2" => Some(self.0[1]),
            "pi" => Some(std::f64::consts::PI),
            _ => None,
        }
    }

    fn eval_func(&self, name: &str, args: &[f64]) -> std::result::Result<f64, FuncEvalError> {
        let [x] = args else {
            return Err(FuncEvalError::NumberArgs(1));
        };
        match name {
            "sin" => Ok(x.sin()),
            "cos" => Ok(x.cos()),
            "exp" => Ok(x.exp()),
            _ => Err(FuncEvalError::UnknownFunction),
        }
    }
}

/// Rounds to 12 significant digits for stable textual output.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Writes a grid field over the full mapped lattice as `y1,y2,<column>`.
pub fn write_field_csv(path: impl AsRef<Path>, field: &ScalarField, column: &str) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Ingest {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let csv_err = |e: csv::Error| Error::Ingest {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    w.write_record(["y1", "y2", column]).map_err(csv_err)?;
    let side = field.grid().side();
    for j in 0..side {
        for i in 0..side {
            let y = field.point(i, j);
            w.write_record([
                round_significant(y[0]).to_string(),
                round_significant(y[1]).to_string(),
                round_significant(field.get(i, j)).to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write;

    #[test]
    fn expressions_follow_whitelist() {
        let f = ExprField::parse("2 + 0.1*sin(y1/5) - y2^2 * exp(-y1) + cos(pi*y2)").unwrap();
        let y = [0.3, -0.4];
        let expected = 2.0 + 0.1 * (0.3f64 / 5.0).sin() - 0.16 * (-0.3f64).exp()
            + (std::f64::consts::PI * -0.4).cos();
        assert_relative_eq!(f.value(y), expected, max_relative = 1e-14);

        for bad in ["sqrt(y1)", "y3 + 1", "y1^y2", "y1^0.5", "max(y1, y2)", "ln(2)", "y1 % 2"] {
            assert!(matches!(ExprField::parse(bad), Err(Error::Expression(_))), "{bad}");
        }
        assert!(ExprField::parse("y1 +* 2").is_err());
    }

    #[test]
    fn csv_round_trip_and_interpolation() {
        let d = EllipseDomain::new(2.0, 1.0).unwrap();
        let g = DiskGrid::new(16).unwrap();
        let f = ScalarField::sample(d, g, |y| 1.0 + 0.25 * y[0] - 0.5 * y[1]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        write_field_csv(&path, &f, "H").unwrap();
        let map = LatticeMap::read_csv(&path, "H").unwrap();
        assert_relative_eq!(map.value([0.37, -0.11]), 1.0 + 0.25 * 0.37 + 0.5 * 0.11, epsilon = 1e-11);
        let back = map.to_scalar_field(d, g).unwrap();
        assert!(back.values().iter().zip(f.values()).all(|(a, b)| (a - b).abs() < 1e-11));
        assert!(matches!(
            map.to_scalar_field(d, DiskGrid::new(32).unwrap()),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            map.to_scalar_field(EllipseDomain::new(3.0, 1.0).unwrap(), g),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn corrupted_csv_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut file = std::fs::File::create(&path).unwrap();
        writeln!(file, "y1,y2,H\n0,0,1\n1,0,abc\n0,1,1\n1,1,1").unwrap();
        let err = LatticeMap::read_csv(&path, "H").unwrap_err();
        assert!(matches!(err, Error::Ingest { .. }), "{err}");
        assert!(err.to_string().contains("line 3"));

        std::fs::write(&path, "a,b,c\n0,0,1\n").unwrap();
        assert!(matches!(LatticeMap::read_csv(&path, "H"), Err(Error::Ingest { .. })));
        std::fs::write(&path, "y1,y2,H\n0,0,1\n1,0,1\n0,1,1\n").unwrap();
        assert!(matches!(LatticeMap::read_csv(&path, "H"), Err(Error::Ingest { .. })));
        assert!(matches!(
            LatticeMap::read_csv(dir.path().join("missing.csv"), "H"),
            Err(Error::Io { .. })
        ));
    }
}
