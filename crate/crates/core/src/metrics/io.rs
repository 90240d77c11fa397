use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::agents::Side;

pub const SCHEMA_VERSION: u32 = 1;

/// Provenance line written as a `#` comment above the column header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvHeader {
    pub schema_version: u32,
    pub seed: u64,
    pub replica: u64,
    pub config_hash: String,
}

impl CsvHeader {
    fn to_line(&self) -> String {
        format!(
            "# schema_version={} seed={} replica={} config_hash={}",
            self.schema_version, self.seed, self.replica, self.config_hash
        )
    }

    fn parse(line: &str) -> Result<Self, MetricsError> {
        let bad = || MetricsError::Format(format!("bad header line {line:?}"));
        let body = line.strip_prefix('#').ok_or_else(bad)?;
        let mut header = CsvHeader { schema_version: 0, seed: 0, replica: 0, config_hash: String::new() };
        for field in body.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(bad)?;
            match key {
                "schema_version" => header.schema_version = value.parse().map_err(|_| bad())?,
                "seed" => header.seed = value.parse().map_err(|_| bad())?,
                "replica" => header.replica = value.parse().map_err(|_| bad())?,
                "config_hash" => header.config_hash = value.to_string(),
                _ => {}
            }
        }
        if header.schema_version != SCHEMA_VERSION {
            return Err(MetricsError::Format(format!(
                "unsupported schema_version {}",
                header.schema_version
            )));
        }
        Ok(header)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: u64,
    pub a: f64,
    pub b: f64,
    #[serde(with = "side_code")]
    pub side: Side,
    pub stake: f64,
    pub p_hat: Option<f64>,
    pub step_profit: f64,
    pub cum_profit: f64,
    pub regret_stoch: f64,
}

mod side_code {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::agents::Side;

    pub fn serialize<S: Serializer>(side: &Side, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(side.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Side, D::Error> {
        let text = String::deserialize(d)?;
        Side::parse(&text).ok_or_else(|| D::Error::custom(format!("unknown side {text:?}")))
    }
}

pub fn write_trajectory_csv<W: Write>(
    mut out: W,
    header: &CsvHeader,
    rows: impl IntoIterator<Item = TrajectoryRow>,
) -> Result<(), MetricsError> {
    writeln!(out, "{}", header.to_line())?;
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<(CsvHeader, Vec<TrajectoryRow>), MetricsError> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let header = CsvHeader::parse(first.trim_end())?;
    let rows = csv::Reader::from_reader(reader).deserialize().collect::<Result<Vec<TrajectoryRow>, _>>()?;
    Ok((header, rows))
}
