//! Table CSV: comma separated, header first, categories written by name.

use std::collections::BTreeMap;

use tabsyn_core::features::{GeoPoint, Polyline};
use tabsyn_core::{ColumnKind, DataTable, Error, Row, TableSchema, Value};

fn csv_error(e: csv::Error) -> Error {
    Error::BadCell {
        row: e.position().map_or(0, |p| p.line() as usize),
        column: String::new(),
        reason: e.to_string(),
    }
}

pub(crate) fn parse_cell(schema: &TableSchema, col: usize, raw: &str, row: usize) -> Result<Value, Error> {
    let column = &schema.columns()[col];
    let bad = |reason: &str| Error::BadCell {
        row,
        column: column.name.clone(),
        reason: reason.into(),
    };
    match &column.kind {
        ColumnKind::Continuous => {
            let v: f64 = raw.trim().parse().map_err(|_| bad("not a number"))?;
            if v.is_finite() {
                Ok(Value::Continuous(v))
            } else {
                Err(bad("not finite"))
            }
        }
        ColumnKind::Discrete { categories } => categories
            .iter()
            .position(|c| c == raw)
            .map(Value::Discrete)
            .ok_or_else(|| bad(&format!("unknown category `{raw}`"))),
    }
}

/// Parses CSV text whose header lists the schema's columns in order.
/// Rows are numbered from 1 (the first line after the header) in errors.
pub fn parse_csv(text: &str, schema: &TableSchema) -> Result<DataTable, Error> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    let expected: Vec<&str> = schema.columns().iter().map(|c| c.name.as_str()).collect();
    for (i, name) in expected.iter().enumerate() {
        if header.get(i).map(str::trim) != Some(*name) {
            return Err(Error::UnknownColumn(header.get(i).unwrap_or(name).to_string()));
        }
    }
    if header.len() != expected.len() {
        return Err(Error::UnknownColumn(header.get(expected.len()).unwrap_or("").to_string()));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row_no = i + 1;
        if record.len() != expected.len() {
            return Err(Error::RaggedRow {
                row: row_no,
                expected: expected.len(),
                found: record.len(),
            });
        }
        let row: Row = record
            .iter()
            .enumerate()
            .map(|(c, raw)| parse_cell(schema, c, raw, row_no))
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    DataTable::new(schema.clone(), rows)
}

/// Writes a table with continuous cells in shortest round-trip form.
pub fn serialize_csv(table: &DataTable) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let schema = table.schema();
    writer
        .write_record(schema.columns().iter().map(|c| c.name.as_str()))
        .expect("writing to memory");
    for row in table.rows() {
        let cells: Vec<String> = row
            .iter()
            .zip(schema.columns())
            .map(|(v, col)| match (v, &col.kind) {
                (Value::Continuous(x), _) => format!("{x}"),
                (Value::Discrete(k), ColumnKind::Discrete { categories }) => categories[*k].clone(),
                (Value::Discrete(k), ColumnKind::Continuous) => k.to_string(),
            })
            .collect();
        writer.write_record(&cells).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}

/// Header-indexed raw rows, for inputs whose columns are a superset of a
/// schema (ingestion).
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(csv_error)?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            if rec.len() != header.len() {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: header.len(),
                    found: rec.len(),
                });
            }
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(RawTable { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn number(&self, row: usize, col: usize) -> Result<f64, Error> {
        let raw = self.rows[row][col].trim();
        raw.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::BadCell {
            row: row + 1,
            column: self.header[col].clone(),
            reason: format!("not a finite number: `{raw}`"),
        })
    }
}

/// Power lines from `line_id,vertex_order,lat,lon` rows; vertices are
/// sorted by their order within each line, lines by id.
pub fn parse_polylines(text: &str) -> Result<Vec<Polyline>, Error> {
    let raw = RawTable::parse(text)?;
    let col = |name: &str| raw.column(name).ok_or_else(|| Error::UnknownColumn(name.into()));
    let (id, order, lat, lon) = (col("line_id")?, col("vertex_order")?, col("lat")?, col("lon")?);
    let mut lines: BTreeMap<String, Vec<(f64, GeoPoint)>> = BTreeMap::new();
    for r in 0..raw.rows.len() {
        let p = GeoPoint::new(raw.number(r, lat)?, raw.number(r, lon)?)?;
        lines
            .entry(raw.rows[r][id].clone())
            .or_default()
            .push((raw.number(r, order)?, p));
    }
    lines
        .into_values()
        .map(|mut pts| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            Polyline::new(pts.into_iter().map(|(_, p)| p).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tabsyn_core::Column;

    fn schema() -> TableSchema {
        TableSchema::new(vec![
            Column::continuous("temp"),
            Column::discrete("label", ["Fire", "NoFire"]),
        ])
        .unwrap()
    }

    #[test]
    fn two_valid_lines() {
        let t = parse_csv("temp,label\n1.5,Fire\n-2,NoFire\n", &schema()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.rows()[1], vec![Value::Continuous(-2.0), Value::Discrete(1)]);
    }

    #[test]
    fn unknown_category_is_bad_cell() {
        let e = parse_csv("temp,label\n1,Maybe\n", &schema()).unwrap_err();
        assert!(matches!(e, Error::BadCell { row: 1, .. }), "{e:?}");
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_csv("temp,label\n", &schema()).unwrap().is_empty());
    }

    #[test]
    fn header_and_shape_errors() {
        assert!(matches!(parse_csv("t,label\n", &schema()), Err(Error::UnknownColumn(_))));
        assert!(matches!(
            parse_csv("temp,label\n1,Fire,3\n", &schema()),
            Err(Error::RaggedRow { row: 1, expected: 2, found: 3 })
        ));
        assert!(matches!(parse_csv("temp,label\n,Fire\n", &schema()), Err(Error::BadCell { .. })));
        assert!(matches!(parse_csv("temp,label\nNaN,Fire\n", &schema()), Err(Error::BadCell { .. })));
    }

    #[test]
    fn quoted_categories_round_trip() {
        let s = TableSchema::new(vec![Column::discrete("c", ["a,b", "plain"])]).unwrap();
        let t = parse_csv("c\n\"a,b\"\nplain\n", &s).unwrap();
        let text = serialize_csv(&t);
        assert_eq!(text, "c\n\"a,b\"\nplain\n");
        assert_eq!(parse_csv(&text, &s).unwrap(), t);
    }

    #[test]
    fn polylines_sorted_by_vertex_order() {
        let lines = parse_polylines("line_id,vertex_order,lat,lon\nB,2,1,1\nA,1,0,0\nB,1,1,0\nA,2,0,1\n").unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].points()[0].lon, 0.0);
        assert!(parse_polylines("line_id,vertex_order,lat,lon\nA,1,0,0\n").is_err());
    }
}
