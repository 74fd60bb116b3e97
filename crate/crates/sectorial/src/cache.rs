//! Sidecar cache `<matrix file>.spectral.json` holding the Hermitian eigendecomposition,
//! keyed by the SHA-256 of the matrix file contents.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sectorial_core::linalg::CMatrix;
use sectorial_core::operators::SpectralData;
use sectorial_core::C64;

use crate::report::Cx;

/// What happened to the sidecar while loading an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    /// Computed and written (or the write was skipped).
    Computed,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    sha256: String,
    n: usize,
    eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, row-major.
    vectors: Vec<Cx>,
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sidecar_path(matrix_path: &Path) -> PathBuf {
    let mut s = matrix_path.as_os_str().to_owned();
    s.push(".spectral.json");
    PathBuf::from(s)
}

fn load(path: &Path, hash: &str, n: usize) -> Option<SpectralData> {
    let text = fs::read_to_string(path).ok()?;
    let car: Sidecar = serde_json::from_str(&text).ok()?;
    if car.sha256 != hash || car.n != n || car.eigenvalues.len() != n || car.vectors.len() != n * n {
        return None;
    }
    let v = CMatrix::from_row_major(n, n, car.vectors.iter().map(|c| C64::new(c.re, c.im)).collect());
    let inv = v.adjoint();
    SpectralData::from_parts(car.eigenvalues.iter().map(|&l| C64::new(l, 0.0)).collect(), v, inv).ok()
}

/// Eigendata of the Hermitian `matrix` read from `matrix_path`, from the sidecar when its key
/// matches `bytes`, otherwise computed and (if `write`) stored. A stale or unreadable sidecar is
/// recomputed; a failed write only costs the next run a recomputation.
pub fn hermitian_spectral(matrix_path: &Path, bytes: &[u8], matrix: &CMatrix, write: bool) -> (SpectralData, CacheStatus) {
    let hash = content_hash(bytes);
    let path = sidecar_path(matrix_path);
    if let Some(data) = load(&path, &hash, matrix.rows()) {
        return (data, CacheStatus::Hit);
    }
    let data = SpectralData::hermitian(matrix);
    if write {
        let n = matrix.rows();
        let v = data.vectors();
        let car = Sidecar {
            sha256: hash,
            n,
            eigenvalues: data.eigenvalues().iter().map(|l| l.re).collect(),
            vectors: (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| Cx::from(v[(i, j)])).collect(),
        };
        if let Ok(text) = serde_json::to_string(&car) {
            if let Err(e) = fs::write(&path, text) {
                eprintln!("warning: could not write spectral cache {}: {e}", path.display());
            }
        }
    }
    (data, CacheStatus::Computed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_name_appends_suffix() {
        assert_eq!(sidecar_path(Path::new("/a/b.mtx")), PathBuf::from("/a/b.mtx.spectral.json"));
    }

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(content_hash(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
