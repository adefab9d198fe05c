use std::io::Write;

use serde::{Deserialize, Serialize};

use super::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Provenance written alongside every set of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: Option<u64>,
    pub generator: String,
    pub log_base: String,
    pub version: String,
}

impl RunMetadata {
    fn comment_line(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "# seed={} generator={} log_base={} version={}\n",
            seed, self.generator, self.log_base, self.version
        )
    }
}

#[derive(Serialize)]
struct JsonDocument<'a, R, S> {
    metadata: &'a RunMetadata,
    summary: &'a S,
    records: &'a [R],
}

/// CSV gets a leading `# ...` metadata line and then a fixed header;
/// JSON is an object with `metadata`, `summary`, and `records`.
pub fn write_records<R: Serialize, S: Serialize, W: Write>(
    out: W,
    format: OutputFormat,
    metadata: &RunMetadata,
    summary: &S,
    records: &[R],
) -> Result<(), LabError> {
    let io = |e: std::io::Error| LabError::Io(e.to_string());
    match format {
        OutputFormat::Csv => {
            let mut out = out;
            out.write_all(metadata.comment_line().as_bytes()).map_err(io)?;
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r).map_err(|e| LabError::Io(e.to_string()))?;
            }
            w.flush().map_err(io)?;
        }
        OutputFormat::Json => {
            let mut out = out;
            let doc = JsonDocument { metadata, summary, records };
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| LabError::Io(e.to_string()))?;
            out.write_all(b"\n").map_err(io)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{sweep_theorem, CoefficientPolicy, SweepConfig, SweepRecord};

    fn small() -> SweepConfig {
        SweepConfig {
            d: 2,
            n: 2,
            p_min: 5,
            p_max: 13,
            per_prime: 3,
            policy: CoefficientPolicy::Random { seed: 11 },
            require_precondition: false,
            assert_threshold: None,
        }
    }

    #[test]
    fn csv_header_and_roundtrip() {
        let cfg = small();
        let (records, summary) = sweep_theorem(&cfg).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, OutputFormat::Csv, &cfg.metadata(), &summary, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# seed=11 generator=ChaCha8Rng log_base=e"));
        assert_eq!(lines.next().unwrap(), "p,d,A,C,N,image_size,mu_p,norm_err,precondition");
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let back: Vec<SweepRecord> = rd.deserialize().collect::<Result<_, _>>().unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn json_has_metadata() {
        let cfg = small();
        let (records, summary) = sweep_theorem(&cfg).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, OutputFormat::Json, &cfg.metadata(), &summary, &records).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["metadata"]["seed"], 11);
        assert_eq!(v["metadata"]["log_base"], "e");
        assert_eq!(v["records"].as_array().unwrap().len(), records.len());
        assert_eq!(v["records"][0]["A"], records[0].a);
    }
}
