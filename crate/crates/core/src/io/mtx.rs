//! Matrix Market (coordinate, real, general) read/write for sparse
//! operators.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{parse_error, IoError};
use crate::sparse::{CsrMatrix, TripletMatrix};

pub fn write_matrix_market(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (r, c, v) in m.iter() {
        writeln!(out, "{} {} {}", r + 1, c + 1, v)?;
    }
    Ok(())
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix, IoError> {
    let path = path.as_ref();
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "empty file"))?;
    let header = header?;
    if !header.starts_with("%%MatrixMarket matrix coordinate real") {
        return Err(parse_error(path, 1, "expected a coordinate real MatrixMarket header"));
    }
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut t: Option<TripletMatrix> = None;
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match dims {
            None => {
                if toks.len() != 3 {
                    return Err(parse_error(path, lineno, "expected `rows cols nnz`"));
                }
                let parse = |s: &str| -> Result<usize, IoError> {
                    s.parse().map_err(|_| parse_error(path, lineno, format!("bad size {s:?}")))
                };
                let (r, c, n) = (parse(toks[0])?, parse(toks[1])?, parse(toks[2])?);
                dims = Some((r, c, n));
                t = Some(TripletMatrix::new(r, c));
            }
            Some((nr, nc, _)) => {
                if toks.len() != 3 {
                    return Err(parse_error(path, lineno, "expected `row col value`"));
                }
                let r: usize = toks[0]
                    .parse()
                    .map_err(|_| parse_error(path, lineno, "bad row index"))?;
                let c: usize = toks[1]
                    .parse()
                    .map_err(|_| parse_error(path, lineno, "bad column index"))?;
                let v: f64 = toks[2]
                    .parse()
                    .map_err(|_| parse_error(path, lineno, "bad value"))?;
                if r == 0 || c == 0 || r > nr || c > nc {
                    return Err(parse_error(path, lineno, "index out of range (MatrixMarket is 1-based)"));
                }
                t.as_mut().unwrap().push(r - 1, c - 1, v);
            }
        }
    }
    Ok(t
        .ok_or_else(|| parse_error(path, 0, "missing size line"))?
        .to_csr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen::gen_regular;
    use crate::operators::exterior_derivative;
    use crate::surface::AnalyticSurface;

    #[test]
    fn matrix_market_round_trip() {
        let mesh = gen_regular(AnalyticSurface::standard_torus(), 4).unwrap();
        let d1 = exterior_derivative(&mesh, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d1.mtx");
        write_matrix_market(d1.matrix(), &path).unwrap();
        let back = read_matrix_market(&path).unwrap();
        assert_eq!(back.nrows(), d1.matrix().nrows());
        assert_eq!(back.ncols(), d1.matrix().ncols());
        assert_eq!(back.nnz(), d1.matrix().nnz());
        for (r, c, v) in d1.matrix().iter() {
            assert_eq!(back.get(r, c), v);
        }
    }

    #[test]
    fn rejects_wrong_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.mtx");
        std::fs::write(&path, "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n").unwrap();
        assert!(read_matrix_market(&path).is_err());
    }
}
