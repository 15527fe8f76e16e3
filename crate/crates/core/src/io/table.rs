//! Proportion table CSV: header `model_tag,on,off,other`, LF line endings.

use std::path::Path;

use crate::analytics::ProportionRow;
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn proportions_to_csv(rows: &[ProportionRow]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(["model_tag", "on", "off", "other"]).map_err(csv_err)?;
    for row in rows {
        writer
            .write_record([
                row.model_tag.clone(),
                row.on.to_string(),
                row.off.to_string(),
                row.other.to_string(),
            ])
            .map_err(csv_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn proportions_from_csv(text: &str) -> Result<Vec<ProportionRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?;
    if headers.iter().collect::<Vec<_>>() != ["model_tag", "on", "off", "other"] {
        return Err(Error::SchemaMismatch(format!("unexpected CSV header {headers:?}")));
    }
    reader.deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn write_proportions(path: impl AsRef<Path>, rows: &[ProportionRow]) -> Result<()> {
    super::write_atomic(path.as_ref(), proportions_to_csv(rows)?.as_bytes())
}

pub fn read_proportions(path: impl AsRef<Path>) -> Result<Vec<ProportionRow>> {
    proportions_from_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(tag: &str, on: f64, off: f64, other: f64) -> ProportionRow {
        ProportionRow {
            model_tag: tag.into(),
            on,
            off,
            other,
        }
    }

    #[test]
    fn single_row_layout() {
        let text = proportions_to_csv(&[row("convnext_tiny", 0.4, 0.35, 0.25)]).unwrap();
        assert_eq!(text, "model_tag,on,off,other\nconvnext_tiny,0.4,0.35,0.25\n");
    }

    #[test]
    fn round_trip_with_quoting() {
        let rows = vec![row("a,b", 0.1, 0.2, 0.7), row("plain", 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)];
        let text = proportions_to_csv(&rows).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(proportions_from_csv(&text).unwrap(), rows);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(matches!(
            proportions_from_csv("tag,a,b,c\nx,1,2,3\n"),
            Err(Error::SchemaMismatch(_))
        ));
    }
}
