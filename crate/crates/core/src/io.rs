//! CSV ingestion, the bundled pit-prop matrix, and seeded Gaussian instances.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{input, Result, SpcaError};
use crate::linalg::{covariance_from_data, Matrix, SymMatrix};

/// Relative tolerance for accepting a covariance file as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// The 13×13 pit-prop correlation matrix, with its header row of labels.
pub const PITPROPS_CSV: &str = include_str!("../../../data/pitprops.csv");

/// SHA-256 of [`PITPROPS_CSV`].
pub const PITPROPS_SHA256: &str =
    "14dfdd618e1a1b1305fb5b3abd96525b7180bc4194a562b59aaf0610af9bbc1b";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    Covariance,
    DataMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub kind: DataKind,
    pub matrix: Matrix,
    pub names: Option<Vec<String>>,
    pub source: String,
}

impl Dataset {
    /// The matrix `A` of the problem: the file itself for covariance data,
    /// `DᵀD` for a data matrix.
    pub fn covariance(&self) -> Result<SymMatrix> {
        match self.kind {
            DataKind::Covariance => {
                SymMatrix::new(self.matrix.rows(), self.matrix.as_slice().to_vec())
            }
            DataKind::DataMatrix => covariance_from_data(&self.matrix),
        }
    }
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> SpcaError {
    SpcaError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses CSV text. A first row with any non-numeric cell is taken as labels.
pub fn parse_csv(text: &str, kind: DataKind, source: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut names = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, 0, e.to_string())
        })?;
        let line = record.position().map_or(k + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if k == 0 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            names = Some(record.iter().map(str::to_string).collect::<Vec<_>>());
            width = Some(record.len());
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(parse_error(
                    line,
                    record.len().min(w) + 1,
                    format!("expected {w} fields, found {}", record.len()),
                ))
            }
            _ => width = Some(record.len()),
        }
        let mut row = Vec::with_capacity(record.len());
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_error(line, c + 1, format!("'{cell}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(line, c + 1, format!("'{cell}' is not finite")));
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(1, 1, "no numeric rows"));
    }
    let header_lines = usize::from(names.is_some());
    let matrix = Matrix::from_rows(&rows)?;
    let matrix = match kind {
        DataKind::DataMatrix => matrix,
        DataKind::Covariance => symmetrized(matrix, header_lines)?,
    };
    Ok(Dataset {
        kind,
        matrix,
        names,
        source: source.to_string(),
    })
}

fn symmetrized(m: Matrix, header_lines: usize) -> Result<Matrix> {
    let n = m.rows();
    if m.cols() != n {
        return Err(parse_error(
            header_lines + 1,
            1,
            format!("covariance must be square, got {}×{}", n, m.cols()),
        ));
    }
    let mut data = m.as_slice().to_vec();
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (m.get(i, j), m.get(j, i));
            if (p - q).abs() > SYMMETRY_TOL * p.abs().max(q.abs()).max(1.0) {
                return Err(parse_error(
                    header_lines + j + 1,
                    i + 1,
                    format!(
                        "asymmetric entry: ({}, {}) = {p} but ({}, {}) = {q}",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    ),
                ));
            }
            let avg = 0.5 * (p + q);
            data[i * n + j] = avg;
            data[j * n + i] = avg;
        }
    }
    Matrix::new(n, n, data)
}

pub fn load_csv(path: &Path, kind: DataKind) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    parse_csv(&text, kind, &path.display().to_string())
}

/// Writes a matrix with round-trip exact (`{:e}`, shortest) formatting.
pub fn save_csv(path: &Path, matrix: &Matrix, names: Option<&[String]>) -> Result<()> {
    fs::write(path, matrix_to_csv(matrix, names))?;
    Ok(())
}

pub fn matrix_to_csv(matrix: &Matrix, names: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(names) = names {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for i in 0..matrix.rows() {
        for (j, v) in matrix.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:e}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// The bundled pit-prop correlation matrix.
pub fn pitprops() -> Dataset {
    parse_csv(PITPROPS_CSV, DataKind::Covariance, "bundled:pitprops").expect("bundled asset parses")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        RandomSpec { m: 150, n, seed }
    }
}

/// Standard normal pairs by Marsaglia's polar method over a uniform stream.
struct Polar<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> Polar<R> {
    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.rng.random::<f64>() - 1.0;
            let v = 2.0 * self.rng.random::<f64>() - 1.0;
            let r = u * u + v * v;
            if r > 0.0 && r < 1.0 {
                let k = (-2.0 * r.ln() / r).sqrt();
                self.spare = Some(v * k);
                return u * k;
            }
        }
    }
}

/// `m×n` matrix of i.i.d. `N(0, 1/m)` entries.
///
/// The stream is ChaCha20 seeded with `seed_from_u64(seed)`; uniforms are
/// `rand`'s 53-bit `f64` in `[0, 1)`; normals come from the polar method,
/// both members of each accepted pair used in order; entries are filled row
/// by row.
pub fn generate_gaussian(spec: RandomSpec) -> Result<Dataset> {
    if spec.m == 0 || spec.n == 0 {
        return input("m and n must be positive");
    }
    let mut g = Polar {
        rng: ChaCha20Rng::seed_from_u64(spec.seed),
        spare: None,
    };
    let scale = 1.0 / (spec.m as f64).sqrt();
    let data = (0..spec.m * spec.n).map(|_| g.next() * scale).collect();
    Ok(Dataset {
        kind: DataKind::DataMatrix,
        matrix: Matrix::new(spec.m, spec.n, data)?,
        names: None,
        source: format!("gaussian:m={},n={},seed={}", spec.m, spec.n, spec.seed),
    })
}

/// `DᵀD` for a generated instance.
pub fn random_covariance(spec: RandomSpec) -> Result<SymMatrix> {
    covariance_from_data(&generate_gaussian(spec)?.matrix)
}

/// A co-stationary point that is not CW-maximal, with an improving neighbor.
#[derive(Clone, Debug, PartialEq)]
pub struct Example1 {
    pub a: SymMatrix,
    /// Uniform weight `s^{-1/2}` on the last `s` coordinates.
    pub x: Vec<f64>,
    /// `x` with its first nonzero moved one coordinate to the left.
    pub x_tilde: Vec<f64>,
}

/// Diagonal `(2·1_{n−s}, 0.5·1_s)` with `f(x) = 1/2` and `f(x̃) = (s+3)/(2s)`.
pub fn example1_instance(n: usize, s: usize) -> Result<Example1> {
    if s == 0 || n <= s {
        return input(format!("need n > s > 0, got n={n}, s={s}"));
    }
    let mut diag = vec![2.0; n - s];
    diag.extend(std::iter::repeat_n(0.5, s));
    let w = 1.0 / (s as f64).sqrt();
    let mut x = vec![0.0; n];
    x[n - s..].fill(w);
    let mut x_tilde = x.clone();
    x_tilde[n - s - 1] = w;
    x_tilde[n - s] = 0.0;
    Ok(Example1 {
        a: SymMatrix::from_diagonal(&diag)?,
        x,
        x_tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::quad_form;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pitprops_asset_is_pinned() {
        assert_eq!(sha256_hex(PITPROPS_CSV.as_bytes()), PITPROPS_SHA256);
        let d = pitprops();
        assert_eq!(d.matrix.rows(), 13);
        assert_eq!(d.names.as_ref().unwrap()[0], "topdiam");
        let a = d.covariance().unwrap();
        assert!(a.diagonal().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn identity_and_header_detection() {
        let d = parse_csv("1,0\n0,1\n", DataKind::Covariance, "t").unwrap();
        assert_eq!(d.matrix.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        assert!(d.names.is_none());
        let d = parse_csv("a,b\n1,0\n0,1\n", DataKind::Covariance, "t").unwrap();
        assert_eq!(d.names.unwrap(), vec!["a", "b"]);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_csv("1,2\n3\n", DataKind::DataMatrix, "t") {
            Err(SpcaError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_csv("1,2\n3,x\n", DataKind::DataMatrix, "t") {
            Err(SpcaError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        match parse_csv("1,2\n2.1,1\n", DataKind::Covariance, "t") {
            Err(SpcaError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("{other:?}"),
        }
        assert!(parse_csv("1,2,3\n2,1,3\n", DataKind::Covariance, "t").is_err());
    }

    #[test]
    fn near_symmetric_is_averaged() {
        let d = parse_csv("1,0.5\n0.5000000000001,1\n", DataKind::Covariance, "t").unwrap();
        assert_eq!(d.matrix.get(0, 1), d.matrix.get(1, 0));
    }

    #[test]
    fn save_load_round_trip() {
        let spec = RandomSpec {
            m: 7,
            n: 5,
            seed: 3,
        };
        let a = random_covariance(spec).unwrap();
        let m = Matrix::new(5, 5, a.as_slice().to_vec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        save_csv(&path, &m, None).unwrap();
        let back = load_csv(&path, DataKind::Covariance).unwrap();
        assert_eq!(back.matrix, m);
    }

    #[test]
    fn gaussian_is_deterministic_with_right_moments() {
        let spec = RandomSpec::new(500, 7);
        let d1 = generate_gaussian(spec).unwrap();
        let d2 = generate_gaussian(spec).unwrap();
        assert_eq!(d1.matrix, d2.matrix);
        assert_eq!((d1.matrix.rows(), d1.matrix.cols()), (150, 500));
        let xs = d1.matrix.as_slice();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!((var - 1.0 / 150.0).abs() < 5e-4, "{var}");
        let m = 150.0f64;
        let mut avg_abs_mean = 0.0;
        for j in 0..500 {
            let col: f64 = (0..150).map(|i| d1.matrix.get(i, j)).sum::<f64>() / m;
            avg_abs_mean += col.abs() / 500.0;
        }
        assert!(avg_abs_mean < 4.0 / m.sqrt() / m.sqrt());
        assert_ne!(
            generate_gaussian(RandomSpec::new(500, 8)).unwrap().matrix,
            d1.matrix
        );
    }

    #[test]
    fn example1_values() {
        for (n, s) in [(10, 3), (20, 5), (50, 10)] {
            let e = example1_instance(n, s).unwrap();
            assert_abs_diff_eq!(quad_form(&e.a, &e.x).unwrap(), 0.5, epsilon = 1e-12);
            let want = (s as f64 + 3.0) / (2.0 * s as f64);
            assert_abs_diff_eq!(quad_form(&e.a, &e.x_tilde).unwrap(), want, epsilon = 1e-12);
        }
        assert!(example1_instance(3, 3).is_err());
    }
}
