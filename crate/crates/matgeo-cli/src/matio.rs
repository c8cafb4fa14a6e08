//! Plain-text matrix files: first line `rows cols`, then one
//! whitespace-separated row per line. Written with 17 significant digits,
//! so values round-trip exactly at double precision.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use matgeo::fixed_rank::RankRPoint;
use matgeo::Matrix;

pub fn read_matrix(path: &Path) -> io::Result<Matrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix(&text).map_err(|msg| {
        io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{}: {msg}", path.display()),
        )
    })
}

pub fn parse_matrix(text: &str) -> Result<Matrix, String> {
    let mut tokens = text.split_whitespace();
    let rows: usize = tokens
        .next()
        .ok_or("empty file")?
        .parse()
        .map_err(|_| "bad row count")?;
    let cols: usize = tokens
        .next()
        .ok_or("missing column count")?
        .parse()
        .map_err(|_| "bad column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    for token in tokens {
        let value: f64 = token
            .parse()
            .map_err(|_| format!("bad entry {token:?}"))?;
        data.push(value);
    }
    if data.len() != rows * cols {
        return Err(format!(
            "expected {} entries, found {}",
            rows * cols,
            data.len()
        ));
    }
    Matrix::from_vec(rows, cols, data).map_err(|e| e.to_string())
}

pub fn write_matrix(path: &Path, m: &Matrix) -> io::Result<()> {
    let mut out = String::new();
    format_matrix(&mut out, m);
    fs::write(path, out)
}

pub fn format_matrix(out: &mut String, m: &Matrix) {
    use std::fmt::Write as _;
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.16e}", m[(i, j)]);
        }
        out.push('\n');
    }
}

pub fn write_matrix_stdout(m: &Matrix) -> io::Result<()> {
    let mut out = String::new();
    format_matrix(&mut out, m);
    io::stdout().write_all(out.as_bytes())
}

/// Factored rank-r point on disk: the U, G and V blocks in the matrix text
/// format, separated by blank lines.
pub fn write_rank_r_point(path: &Path, p: &RankRPoint) -> io::Result<()> {
    let mut out = String::new();
    format_matrix(&mut out, p.u());
    out.push('\n');
    format_matrix(&mut out, p.g());
    out.push('\n');
    format_matrix(&mut out, p.v());
    fs::write(path, out)
}

pub fn read_rank_r_point(path: &Path) -> io::Result<RankRPoint> {
    let text = fs::read_to_string(path)?;
    parse_rank_r_point(&text).map_err(|msg| {
        io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{}: {msg}", path.display()),
        )
    })
}

pub fn parse_rank_r_point(text: &str) -> Result<RankRPoint, String> {
    let blocks: Vec<&str> = text
        .split("\n\n")
        .map(str::trim)
        .filter(|b| !b.is_empty())
        .collect();
    if blocks.len() != 3 {
        return Err(format!(
            "expected 3 blank-line-separated blocks (U, G, V), found {}",
            blocks.len()
        ));
    }
    let u = parse_matrix(blocks[0])?;
    let g = parse_matrix(blocks[1])?;
    let v = parse_matrix(blocks[2])?;
    RankRPoint::new(u, g, v).map_err(|e| e.to_string())
}
