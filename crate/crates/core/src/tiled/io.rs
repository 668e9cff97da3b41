//! Matrix file formats.
//!
//! `TLM1`: an ASCII header line `TLM1 N nb` followed by `N * N` little-endian
//! `f64` values in column-major dense order. CSV: one matrix row per line,
//! comma-separated.

use std::io::{BufRead, BufReader, Read, Write};

use super::DenseMatrix;
use crate::error::{Error, Result};

pub fn write_tlm1<W: Write>(mut w: W, matrix: &DenseMatrix, nb: usize) -> Result<()> {
    writeln!(w, "TLM1 {} {}", matrix.order(), nb)?;
    for v in matrix.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `TLM1` stream, returning the matrix and the tile order from the header.
pub fn read_tlm1<R: Read>(r: R) -> Result<(DenseMatrix, usize)> {
    let mut reader = BufReader::new(r);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("TLM1") {
        return Err(Error::Parse("missing TLM1 magic".into()));
    }
    let mut next_usize = |what: &str| -> Result<usize> {
        fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad {what} in TLM1 header")))
    };
    let order = next_usize("order")?;
    let nb = next_usize("tile order")?;
    let mut bytes = vec![0u8; order * order * 8];
    reader
        .read_exact(&mut bytes)
        .map_err(|_| Error::Parse(format!("TLM1 payload shorter than {order}x{order}")))?;
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((DenseMatrix::from_col_major(order, data)?, nb))
}

pub fn write_csv<W: Write>(w: W, matrix: &DenseMatrix) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for r in 0..matrix.order() {
        let row: Vec<String> = (0..matrix.order())
            .map(|c| format!("{:e}", matrix.get(r, c)))
            .collect();
        wtr.write_record(&row)
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<DenseMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("not a number: `{f}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tlm1_round_trip() {
        let m = DenseMatrix::from_fn(4, |r, c| r as f64 - 0.1 * c as f64);
        let mut buf = Vec::new();
        write_tlm1(&mut buf, &m, 2).unwrap();
        assert!(buf.starts_with(b"TLM1 4 2\n"));
        assert_eq!(buf.len(), 9 + 16 * 8);
        // first payload value is element (0,0), second is (1,0)
        assert_eq!(&buf[17..25], &m.get(1, 0).to_le_bytes());
        let (back, nb) = read_tlm1(&buf[..]).unwrap();
        assert_eq!(nb, 2);
        assert_eq!(back, m);
    }

    #[test]
    fn tlm1_truncated() {
        assert!(matches!(
            read_tlm1(&b"TLM1 2 1\n\0\0"[..]),
            Err(Error::Parse(_))
        ));
        assert!(read_tlm1(&b"XXXX 2 1\n"[..]).is_err());
    }

    #[test]
    fn csv_is_row_major() {
        let m = read_csv(&b"1, 2\n3, 4\n"[..]).unwrap();
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(1, 0), 3.0);
        let mut buf = Vec::new();
        write_csv(&mut buf, &m).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), m);
        assert!(read_csv(&b"1,2\n3\n"[..]).is_err());
    }
}
