//! Matrix and vector readers: Matrix Market (coordinate and array) and plain CSV, with complex
//! entries written as `a+bi`.

use std::fmt;

use sectorial_core::linalg::CMatrix;
use sectorial_core::C64;

/// A malformed input, located by 1-based line and column.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also with `j`, and with spaces around the sign).
pub fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let body = match s.strip_suffix(['i', 'j']) {
        Some(b) => b,
        None => return s.parse().ok().map(|re| C64::new(re, 0.0)),
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    match split {
        Some(k) => Some(C64::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some(C64::new(0.0, imag(body)?)),
    }
}

/// `a+bi` with both parts in shortest round-trip exponent form.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:e}{}{:e}i", z.re, sign, z.im.abs())
}

/// Display adapter for [`format_complex`].
pub struct Cplx(pub C64);

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_complex(self.0))
    }
}

/// Whitespace-separated tokens with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

/// Reads a Matrix Market `matrix` file in `coordinate` or `array` layout.
pub fn parse_matrix_market(text: &str) -> Result<CMatrix, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines.next().ok_or_else(|| ParseError::new(1, 1, "empty file"))?;
    let head = tokens(header);
    let word = |k: usize| head.get(k).map(|(_, t)| t.to_ascii_lowercase());
    if word(0).as_deref() != Some("%%matrixmarket") || word(1).as_deref() != Some("matrix") {
        return Err(ParseError::new(hline, 1, "expected '%%MatrixMarket matrix' header"));
    }
    let col_of = |k: usize| head.get(k).map_or(header.chars().count() + 1, |(c, _)| *c);
    let coordinate = match word(2).as_deref() {
        Some("coordinate") => true,
        Some("array") => false,
        _ => return Err(ParseError::new(hline, col_of(2), "format must be 'coordinate' or 'array'")),
    };
    let field = match word(3).as_deref() {
        Some("real") => Field::Real,
        Some("complex") => Field::Complex,
        Some("integer") => Field::Integer,
        Some("pattern") if coordinate => Field::Pattern,
        _ => return Err(ParseError::new(hline, col_of(3), "unsupported field type")),
    };
    let symmetry = match word(4).as_deref() {
        Some("general") => Symmetry::General,
        Some("symmetric") => Symmetry::Symmetric,
        Some("skew-symmetric") => Symmetry::Skew,
        Some("hermitian") => Symmetry::Hermitian,
        _ => return Err(ParseError::new(hline, col_of(4), "unsupported symmetry")),
    };
    let mut body = lines.filter(|(_, l)| !l.trim_start().starts_with('%') && !l.trim().is_empty());

    let (sline, size) = body.next().ok_or_else(|| ParseError::new(hline + 1, 1, "missing size line"))?;
    let st = tokens(size);
    let want = if coordinate { 3 } else { 2 };
    if st.len() != want {
        return Err(ParseError::new(sline, 1, format!("size line needs {want} integers")));
    }
    let mut dims = [0usize; 3];
    for (k, (c, t)) in st.iter().enumerate() {
        dims[k] = t.parse().map_err(|_| ParseError::new(sline, *c, format!("'{t}' is not a non-negative integer")))?;
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows != cols {
        return Err(ParseError::new(sline, 1, format!("matrix must be square, got {rows}x{cols}")));
    }
    if rows == 0 {
        return Err(ParseError::new(sline, 1, "matrix is empty"));
    }
    let per_entry = match field {
        Field::Complex => 2,
        Field::Pattern => 0,
        _ => 1,
    };
    let value = |toks: &[(usize, &str)], line: usize| -> Result<C64, ParseError> {
        let num = |(c, t): (usize, &str)| -> Result<f64, ParseError> {
            if field == Field::Integer {
                t.parse::<i64>().map(|v| v as f64).map_err(|_| ParseError::new(line, c, format!("'{t}' is not an integer")))
            } else {
                t.parse::<f64>().map_err(|_| ParseError::new(line, c, format!("'{t}' is not a number")))
            }
        };
        match field {
            Field::Pattern => Ok(C64::new(1.0, 0.0)),
            Field::Complex => Ok(C64::new(num(toks[0])?, num(toks[1])?)),
            _ => Ok(C64::new(num(toks[0])?, 0.0)),
        }
    };
    let mut m = CMatrix::zeros(rows, cols);
    let mut place = |i: usize, j: usize, v: C64| {
        m[(i, j)] = v;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] = v,
                Symmetry::Skew => m[(j, i)] = -v,
                Symmetry::Hermitian => m[(j, i)] = v.conj(),
            }
        }
    };
    let lower_only = symmetry != Symmetry::General;
    let mut count = 0usize;
    if coordinate {
        let nnz = dims[2];
        for (line, l) in body.by_ref() {
            let t = tokens(l);
            if count == nnz {
                return Err(ParseError::new(line, t[0].0, format!("more than the declared {nnz} entries")));
            }
            if t.len() != 2 + per_entry {
                return Err(ParseError::new(line, 1, format!("expected {} fields, found {}", 2 + per_entry, t.len())));
            }
            let mut idx = [0usize; 2];
            for k in 0..2 {
                let (c, s) = t[k];
                let bound = if k == 0 { rows } else { cols };
                idx[k] = match s.parse::<usize>() {
                    Ok(v) if (1..=bound).contains(&v) => v - 1,
                    _ => return Err(ParseError::new(line, c, format!("index '{s}' is not in 1..={bound}"))),
                };
            }
            if lower_only && idx[1] > idx[0] {
                return Err(ParseError::new(line, t[1].0, "symmetric storage holds the lower triangle only"));
            }
            let v = value(&t[2..], line)?;
            place(idx[0], idx[1], v);
            count += 1;
        }
        if count != nnz {
            return Err(ParseError::new(text.lines().count() + 1, 1, format!("expected {nnz} entries, found {count}")));
        }
    } else {
        // column-major, lower triangle only for symmetric storage
        let slots: Vec<(usize, usize)> = (0..cols)
            .flat_map(|j| (0..rows).map(move |i| (i, j)))
            .filter(|&(i, j)| !lower_only || i >= j)
            .filter(|&(i, j)| !(symmetry == Symmetry::Skew && i == j))
            .collect();
        for (line, l) in body.by_ref() {
            let t = tokens(l);
            if count == slots.len() {
                return Err(ParseError::new(line, t[0].0, format!("more than the expected {} entries", slots.len())));
            }
            if t.len() != per_entry {
                return Err(ParseError::new(line, 1, format!("expected {per_entry} fields, found {}", t.len())));
            }
            let (i, j) = slots[count];
            place(i, j, value(&t, line)?);
            count += 1;
        }
        if count != slots.len() {
            return Err(ParseError::new(text.lines().count() + 1, 1, format!("expected {} entries, found {count}", slots.len())));
        }
    }
    Ok(m)
}

/// Reads comma-separated rows of real or `a+bi` entries; `#` starts a comment line.
pub fn parse_csv_table(text: &str) -> Result<Vec<Vec<C64>>, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            ParseError::new(line, 1, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut row = Vec::with_capacity(rec.len());
        for (k, f) in rec.iter().enumerate() {
            row.push(parse_complex(f).ok_or_else(|| ParseError::new(line, k + 1, format!("'{f}' is not a number")))?);
        }
        rows.push((line, row));
    }
    let width = rows.first().map_or(0, |r| r.1.len());
    for (line, r) in &rows {
        if r.len() != width {
            return Err(ParseError::new(*line, r.len().min(width) + 1, format!("row has {} fields, expected {width}", r.len())));
        }
    }
    Ok(rows.into_iter().map(|r| r.1).collect())
}

/// Square matrix from CSV rows.
pub fn parse_csv_matrix(text: &str) -> Result<CMatrix, ParseError> {
    let rows = parse_csv_table(text)?;
    let n = rows.len();
    if n == 0 {
        return Err(ParseError::new(1, 1, "matrix is empty"));
    }
    if rows[0].len() != n {
        return Err(ParseError::new(1, 1, format!("matrix must be square, got {n}x{}", rows[0].len())));
    }
    Ok(CMatrix::from_row_major(n, n, rows.into_iter().flatten().collect()))
}

/// Vector from a single CSV row or a single CSV column.
pub fn parse_csv_vector(text: &str) -> Result<Vec<C64>, ParseError> {
    let rows = parse_csv_table(text)?;
    match rows.as_slice() {
        [] => Err(ParseError::new(1, 1, "vector is empty")),
        [row] => Ok(row.clone()),
        _ if rows[0].len() == 1 => Ok(rows.into_iter().flatten().collect()),
        _ => Err(ParseError::new(1, 2, "a vector needs one row or one column")),
    }
}

/// Matrix Market when the text starts with its banner, CSV otherwise.
pub fn parse_matrix(text: &str) -> Result<CMatrix, ParseError> {
    if text.trim_start_matches('\u{feff}').trim_start().starts_with("%%") {
        parse_matrix_market(text.trim_start_matches('\u{feff}'))
    } else {
        parse_csv_matrix(text)
    }
}

/// One entry per line.
pub fn write_csv_vector(x: &[C64]) -> String {
    let mut s = String::new();
    for v in x {
        s.push_str(&format_complex(*v));
        s.push('\n');
    }
    s
}
