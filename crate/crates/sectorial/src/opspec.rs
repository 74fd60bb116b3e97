//! Operator sources: builtin names or matrix files.
//!
//! Builtins: `laplacian1d:n`, `laplacian1d-matfree:n`, `identity:n`, `diag:a,b,…` (complex
//! entries allowed). Anything else is a path to a Matrix Market or CSV matrix.

use std::fs;
use std::path::Path;

use sectorial_core::operators::OperatorHandle;
use sectorial_core::C64;

use crate::cache::{self, CacheStatus};
use crate::error::CliError;
use crate::io::{self, parse_complex};

/// Loading options for file operators.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Sector half-angle of a non-Hermitian matrix.
    pub omega: Option<f64>,
    /// Read and write the spectral sidecar for Hermitian matrices.
    pub cache: bool,
}

/// Where the operator came from and whether the sidecar was used.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub op: OperatorHandle,
    pub cache: Option<CacheStatus>,
}

fn size(spec: &str, arg: &str) -> Result<usize, CliError> {
    arg.trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("operator '{spec}': '{arg}' is not a dimension")))
}

pub fn load(spec: &str, opts: LoadOptions) -> Result<Loaded, CliError> {
    let builtin = |op| Ok(Loaded { op, cache: None });
    if let Some((name, arg)) = spec.split_once(':') {
        match name {
            "laplacian1d" => return builtin(OperatorHandle::dirichlet_laplacian_1d(size(spec, arg)?)?),
            "laplacian1d-matfree" => return builtin(OperatorHandle::dirichlet_laplacian_1d_matrix_free(size(spec, arg)?)?),
            "identity" => return builtin(OperatorHandle::identity(size(spec, arg)?)?),
            "diag" => {
                let d: Vec<C64> = arg
                    .split(',')
                    .map(|t| parse_complex(t).ok_or_else(|| CliError::Parse(format!("operator '{spec}': '{t}' is not a number"))))
                    .collect::<Result<_, _>>()?;
                let omega = opts.omega.unwrap_or_else(|| d.iter().map(|l| l.arg().abs()).fold(0.0, f64::max));
                return builtin(OperatorHandle::diagonal(d, omega)?);
            }
            _ => {}
        }
    }
    load_file(Path::new(spec), opts)
}

fn load_file(path: &Path, opts: LoadOptions) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Parse(format!("{}: not valid UTF-8", path.display())))?;
    let m = io::parse_matrix(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let hermitian = m.is_hermitian(1e-13 * m.max_abs());
    if hermitian {
        let op = OperatorHandle::from_dense(m.clone(), opts.omega.unwrap_or(0.0))?;
        let (data, status) = if opts.cache {
            cache::hermitian_spectral(path, &bytes, &m, true)
        } else {
            (sectorial_core::operators::SpectralData::hermitian(&m), CacheStatus::Computed)
        };
        return Ok(Loaded { op: op.with_spectral(data)?, cache: Some(status) });
    }
    let omega = opts
        .omega
        .ok_or_else(|| CliError::Precondition(format!("{}: non-Hermitian matrix needs --omega", path.display())))?;
    Ok(Loaded { op: OperatorHandle::from_dense(m, omega)?, cache: None })
}

/// `x` from a CSV file, a canonical basis vector, or all ones.
pub fn load_vector(path: Option<&Path>, basis: Option<usize>, n: usize) -> Result<Vec<C64>, CliError> {
    let x = match (path, basis) {
        (Some(p), _) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            io::parse_csv_vector(&text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?
        }
        (None, Some(k)) => {
            if k >= n {
                return Err(CliError::Precondition(format!("basis index {k} out of range for dimension {n}")));
            }
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[k] = C64::new(1.0, 0.0);
            e
        }
        (None, None) => vec![C64::new(1.0, 0.0); n],
    };
    if x.len() != n {
        return Err(sectorial_core::Error::DimensionMismatch { expected: n, found: x.len() }.into());
    }
    Ok(x)
}
