//! Parsing of command-line inputs.

use std::fs;
use std::path::Path;

use nsl_core::fermat::{enumerate_partitions, Partition};
use nsl_core::{Error, ExponentMatrix, Result};

/// `"k11,k12,k13;k21,k22,k23;k31,k32,k33"`: rows of a matrix whose columns
/// generate the kernel. Returns the columns.
pub fn parse_kernel(s: &str) -> Result<Vec<[i64; 3]>> {
    let rows: Vec<&str> = s.split(';').map(str::trim).collect();
    if rows.len() != 3 {
        return Err(Error::InvalidInput(format!("kernel needs 3 rows separated by ';', got {}", rows.len())));
    }
    let mut m = [[0i64; 3]; 3];
    for (i, row) in rows.iter().enumerate() {
        let entries: Vec<&str> = row.split(',').map(str::trim).collect();
        if entries.len() != 3 {
            return Err(Error::InvalidInput(format!("kernel row {} has {} entries, expected 3", i + 1, entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            m[i][j] = e.parse().map_err(|_| Error::InvalidInput(format!("kernel entry {e:?} is not an integer")))?;
        }
    }
    Ok((0..3).map(|j| [m[0][j], m[1][j], m[2][j]]).collect())
}

pub fn canonical_kernel(cols: &[[i64; 3]]) -> String {
    (0..3).map(|i| cols.iter().map(|c| c[i].to_string()).collect::<Vec<_>>().join(",")).collect::<Vec<_>>().join(";")
}

/// A 4x4 JSON array of integers.
pub fn read_exponent_matrix(path: &Path) -> Result<(ExponentMatrix, String)> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<Vec<i64>> = serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(Error::InvalidInput("exponent matrix must be a 4x4 array".into()));
    }
    let mut a = [[0i64; 4]; 4];
    for (i, r) in rows.iter().enumerate() {
        a[i].copy_from_slice(r);
    }
    let canonical = serde_json::to_string(&a).expect("integers serialize");
    Ok((ExponentMatrix::new(a), canonical))
}

/// Inline rows `"a00,a01,a02,a03;a10,...;...;..."`.
pub fn parse_exponent_rows(s: &str) -> Result<(ExponentMatrix, String)> {
    let rows: Vec<&str> = s.split(';').map(str::trim).collect();
    if rows.len() != 4 {
        return Err(Error::InvalidInput(format!("exponent matrix needs 4 rows separated by ';', got {}", rows.len())));
    }
    let mut a = [[0i64; 4]; 4];
    for (i, row) in rows.iter().enumerate() {
        let entries: Vec<&str> = row.split(',').map(str::trim).collect();
        if entries.len() != 4 {
            return Err(Error::InvalidInput(format!("exponent matrix row {} has {} entries, expected 4", i + 1, entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            a[i][j] = e.parse().map_err(|_| Error::InvalidInput(format!("matrix entry {e:?} is not an integer")))?;
        }
    }
    let canonical = serde_json::to_string(&a).expect("integers serialize");
    Ok((ExponentMatrix::new(a), canonical))
}

/// `"m1,m2,m3"`
pub fn parse_triple(s: &str) -> Result<[u64; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!("expected three exponents, got {:?}", s)));
    }
    let mut out = [0u64; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| Error::InvalidInput(format!("exponent {p:?} is not a positive integer")))?;
    }
    Ok(out)
}

/// `"all"` or a comma-separated list of indices into the lexicographic
/// enumeration of partitions.
pub fn parse_partitions(s: &str, d: u32) -> Result<Vec<Partition>> {
    let all = enumerate_partitions(d)?;
    if s.trim() == "all" {
        return Ok(all);
    }
    let mut out = Vec::new();
    for p in s.split(',').map(str::trim) {
        let i: usize = p.parse().map_err(|_| Error::InvalidInput(format!("partition index {p:?} is not a number")))?;
        let j = all.get(i).ok_or_else(|| Error::InvalidInput(format!("partition index {i} out of range 0..{}", all.len())))?;
        if !out.contains(j) {
            out.push(j.clone());
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("no partitions given".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_columns() {
        let cols = parse_kernel("1,2,3;4,5,6;7,8,9").unwrap();
        assert_eq!(cols, vec![[1, 4, 7], [2, 5, 8], [3, 6, 9]]);
        assert_eq!(canonical_kernel(&cols), "1,2,3;4,5,6;7,8,9");
        assert!(parse_kernel("1,2;3,4").is_err());
        assert!(parse_kernel("1,2,x;0,1,0;0,0,1").is_err());
    }

    #[test]
    fn partition_lists() {
        assert_eq!(parse_partitions("all", 4).unwrap().len(), 15);
        assert_eq!(parse_partitions("0, 2", 2).unwrap().len(), 2);
        assert!(parse_partitions("3", 2).is_err());
    }

    #[test]
    fn inline_and_json_matrices_agree() {
        let (a, ca) = parse_exponent_rows("4,0,0,0;0,4,0,0;0,0,4,0;0,0,0,4").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        fs::write(&path, "[[4,0,0,0],[0,4,0,0],[0,0,4,0],[0,0,0,4]]").unwrap();
        let (b, cb) = read_exponent_matrix(&path).unwrap();
        assert_eq!(a, b);
        assert_eq!(ca, cb);
        assert!(parse_exponent_rows("1,2,3;4,5,6").is_err());
    }

    #[test]
    fn triples() {
        assert_eq!(parse_triple("6,10,15").unwrap(), [6, 10, 15]);
        assert!(parse_triple("6,10").is_err());
    }
}
