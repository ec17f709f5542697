//! Text file formats: complexes, signals, edge flows, spectra, error curves and run
//! manifests.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{Simplex, SimplicialComplex2};
use crate::error::{Error, Result};
use crate::experiments::ErrorCurve;
use crate::operators::{BlockDims, SimplicialSignal};
use crate::spectral::{Eigenpair, SignalDecomposition, SpectralBasis};

/// Formats a float with 12 significant digits, shortest round-trip form.
pub fn format_float(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_owned()
    } else {
        format!("{rounded}")
    }
}

fn checked(x: f64, what: &'static str) -> Result<String> {
    if x.is_finite() {
        Ok(format_float(x))
    } else {
        Err(Error::NonFinite(what))
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut text = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    Ok(text)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Parses the complex format: one simplex per line, vertex ids strictly increasing,
/// `#` starts a comment line. The downward closure is taken.
pub fn parse_complex(text: &str, origin: &Path) -> Result<SimplicialComplex2> {
    let mut simplices = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ids = line
            .split_whitespace()
            .map(|tok| tok.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(origin, lineno + 1, format!("invalid vertex id in {line:?}: {e}")))?;
        if ids.len() > 3 {
            return Err(Error::parse(origin, lineno + 1, format!("{line:?} has dimension > 2")));
        }
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parse(
                origin,
                lineno + 1,
                format!("vertex ids in {line:?} are not strictly increasing"),
            ));
        }
        simplices.push(ids);
    }
    SimplicialComplex2::build(simplices).map_err(|e| Error::parse(origin, 0, e.to_string()))
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex2> {
    parse_complex(&read_to_string(path)?, path)
}

/// Maximal simplices and isolated vertices, one per line, preceded by a size comment.
pub fn complex_to_string(complex: &SimplicialComplex2) -> String {
    let (n, e, t) = complex.counts();
    let mut out = format!("# N={n} E={e} T={t}\n");
    for s in complex.maximal_simplices() {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

pub fn write_complex(path: &Path, complex: &SimplicialComplex2) -> Result<()> {
    write_file(path, complex_to_string(complex).as_bytes())
}

fn parse_simplex(field: &str) -> Option<Simplex> {
    let ids = field
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    if ids.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    Simplex::from_vertices(&ids).ok()
}

/// Signal CSV: header `simplex,value`, the simplex given as space-separated vertex ids.
/// Simplices absent from the file get value 0.
pub fn read_signal(path: &Path, complex: &SimplicialComplex2) -> Result<SimplicialSignal<f64>> {
    let mut reader = csv::Reader::from_path(path)?;
    expect_header(&mut reader, path, &["simplex", "value"])?;
    let mut data = DVector::zeros(complex.size());
    let mut seen = HashSet::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let simplex = parse_simplex(&record[0])
            .ok_or_else(|| Error::parse(path, line, format!("invalid simplex {:?}", &record[0])))?;
        let index = complex
            .signal_index(&simplex)
            .ok_or_else(|| Error::parse(path, line, format!("simplex {simplex} is not in the complex")))?;
        if !seen.insert(index) {
            return Err(Error::parse(path, line, format!("duplicate simplex {simplex}")));
        }
        data[index] = parse_value(&record[1], path, line)?;
    }
    SimplicialSignal::from_vector(BlockDims::of(complex), data)
}

fn parse_value(field: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|e| Error::parse(path, line, format!("invalid value {field:?}: {e}")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn expect_header<R: Read>(reader: &mut csv::Reader<R>, path: &Path, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::parse(
            path,
            1,
            format!("expected header {:?}, found {:?}", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(())
}

/// Writes one row per simplex in layout order. Extra named columns are appended after
/// `value`.
pub fn write_signal_columns<W: Write>(
    writer: W,
    complex: &SimplicialComplex2,
    columns: &[(&str, &DVector<f64>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["simplex"];
    header.extend(columns.iter().map(|(name, _)| *name));
    w.write_record(&header)?;
    for (i, s) in complex.simplices().enumerate() {
        let mut row = vec![s.to_string()];
        for (_, col) in columns {
            row.push(checked(col[i], "signal")?);
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_signal(path: &Path, complex: &SimplicialComplex2, signal: &SimplicialSignal<f64>) -> Result<()> {
    let mut buf = Vec::new();
    write_signal_columns(&mut buf, complex, &[("value", signal.as_vector())])?;
    write_file(path, &buf)
}

/// `simplex,value,s1,s2,s_harm`.
pub fn write_decomposition(
    path: &Path,
    complex: &SimplicialComplex2,
    signal: &SimplicialSignal<f64>,
    parts: &SignalDecomposition<f64>,
) -> Result<()> {
    let mut buf = Vec::new();
    write_signal_columns(
        &mut buf,
        complex,
        &[
            ("value", signal.as_vector()),
            ("s1", parts.s1.as_vector()),
            ("s2", parts.s2.as_vector()),
            ("s_harm", parts.s_harm.as_vector()),
        ],
    )?;
    write_file(path, &buf)
}

/// Edge-flow CSV with header `v0,v1,value` (`v0 < v1`, each row an existing edge).
/// Edges without a row carry zero flow.
pub fn read_edge_flow(path: &Path, complex: &SimplicialComplex2) -> Result<DVector<f64>> {
    let mut reader = csv::Reader::from_path(path)?;
    expect_header(&mut reader, path, &["v0", "v1", "value"])?;
    let mut flow = DVector::zeros(complex.num_edges());
    let mut seen = HashSet::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let vertex = |k: usize| {
            record[k]
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::parse(path, line, format!("invalid vertex {:?}: {e}", &record[k])))
        };
        let (a, b) = (vertex(0)?, vertex(1)?);
        if a >= b {
            return Err(Error::parse(path, line, format!("edge ({a}, {b}) is not increasing")));
        }
        let index = complex
            .edge_index(a, b)
            .ok_or_else(|| Error::parse(path, line, format!("edge ({a}, {b}) is not in the complex")))?;
        if !seen.insert(index) {
            return Err(Error::parse(path, line, format!("duplicate edge ({a}, {b})")));
        }
        flow[index] = parse_value(&record[2], path, line)?;
    }
    Ok(flow)
}

pub fn write_edge_flow(path: &Path, complex: &SimplicialComplex2, flow: &DVector<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["v0", "v1", "value"])?;
    for (&[a, b], v) in complex.edges().iter().zip(flow.iter()) {
        w.write_record([a.to_string(), b.to_string(), checked(*v, "edge flow")?])?;
    }
    let buf = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    write_file(path, &buf)
}

fn coordinate_label(s: &Simplex) -> String {
    let ids: Vec<String> = s.vertices().iter().map(ToString::to_string).collect();
    let prefix = ["v", "e", "t"][s.dim()];
    format!("{prefix}{}", ids.join("_"))
}

/// Eigenpairs sorted by ascending eigenvalue; ties keep the family order d1, d2, harm.
pub fn sorted_eigenpairs(basis: &SpectralBasis<f64>) -> Vec<Eigenpair<f64>> {
    let mut pairs = basis.eigenpairs();
    pairs.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    pairs
}

/// Spectrum CSV: `family,alignment,eigenvalue`, then one column per simplex
/// (`v<i>`, `e<i>_<j>`, `t<i>_<j>_<k>`).
pub fn write_spectrum<W: Write>(writer: W, complex: &SimplicialComplex2, basis: &SpectralBasis<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["family".to_owned(), "alignment".to_owned(), "eigenvalue".to_owned()];
    header.extend(complex.simplices().map(|s| coordinate_label(&s)));
    w.write_record(&header)?;
    for pair in sorted_eigenpairs(basis) {
        let mut row = vec![
            pair.family.label().to_owned(),
            pair.alignment.label().to_owned(),
            checked(pair.eigenvalue, "spectrum")?,
        ];
        for x in pair.vector.iter() {
            row.push(checked(*x, "spectrum")?);
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Error-curve CSV: `z,gamma,mean_delta,std_delta`.
pub fn write_error_curve<W: Write>(writer: W, curve: &ErrorCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["z", "gamma", "mean_delta", "std_delta"])?;
    for p in &curve.points {
        w.write_record([
            checked(p.z, "error curve")?,
            checked(p.gamma, "error curve")?,
            checked(p.mean_delta, "error curve")?,
            checked(p.std_delta, "error curve")?,
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Hex SHA-256 of a file's bytes.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Everything needed to rerun a command and reproduce its output bitwise.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seeds: BTreeMap<String, u64>,
    /// Input path -> SHA-256.
    pub inputs: BTreeMap<String, String>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters
            .insert(key.to_owned(), serde_json::to_value(value).expect("parameter serializes"));
        self
    }

    pub fn seed(&mut self, key: &str, seed: u64) -> &mut Self {
        self.seeds.insert(key.to_owned(), seed);
        self
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        let digest = file_digest(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(self)
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.metadata
            .insert(key.to_owned(), serde_json::to_value(value).expect("metadata serializes"));
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_file(path, text.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_to_string(path)?)?)
    }
}

/// `<output>.manifest.json` next to an output file.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{ngf_generate, NgfConfig};

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(3f64.sqrt()), "1.73205080757");
        assert_eq!(format_float(-2.5e-13), "-0.00000000000025");
    }

    #[test]
    fn complex_text_round_trip() {
        let c = ngf_generate(&NgfConfig::new(25, 4)).unwrap();
        let text = complex_to_string(&c);
        let back = parse_complex(&text, Path::new("mem")).unwrap();
        assert_eq!(back, c);
        assert_eq!(complex_to_string(&back), text);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_complex("# header\n0 1 2\n0 0 1\n", Path::new("f.txt")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_complex("0 1 2 3\n", Path::new("f")).is_err());
        assert!(parse_complex("0 x\n", Path::new("f")).is_err());
        assert!(parse_complex("2 1\n", Path::new("f")).is_err());
    }

    #[test]
    fn comments_and_isolated_vertices() {
        let c = parse_complex("# a comment\n\n0 1 2\n3\n", Path::new("f")).unwrap();
        assert_eq!(c.counts(), (4, 3, 1));
        assert_eq!(complex_to_string(&c), "# N=4 E=3 T=1\n0 1 2\n3\n");
    }

    #[test]
    fn manifest_path_is_beside_output() {
        assert_eq!(manifest_path(Path::new("out/curve.csv")), Path::new("out/curve.csv.manifest.json"));
    }

    #[test]
    fn signal_and_flow_files() {
        let dir = tempfile::tempdir().unwrap();
        let c = SimplicialComplex2::build([[0, 1, 2]]).unwrap();
        let sig = dir.path().join("s.csv");
        fs::write(&sig, "simplex,value\n0 1,2.5\n0 1 2,-1\n1,0.5\n").unwrap();
        let s = read_signal(&sig, &c).unwrap();
        assert_eq!(s.as_vector().as_slice(), &[0.0, 0.5, 0.0, 2.5, 0.0, 0.0, -1.0]);

        fs::write(&sig, "simplex,value\n0 3,1\n").unwrap();
        assert!(matches!(read_signal(&sig, &c), Err(Error::Parse { line: 2, .. })));
        fs::write(&sig, "simplex,value\n0 1,1\n0 1,2\n").unwrap();
        assert!(read_signal(&sig, &c).is_err());
        fs::write(&sig, "node,value\n0,1\n").unwrap();
        assert!(read_signal(&sig, &c).is_err());

        let flow = dir.path().join("f.csv");
        fs::write(&flow, "v0,v1,value\n1,2,3.0\n0,1,-1\n").unwrap();
        assert_eq!(read_edge_flow(&flow, &c).unwrap().as_slice(), &[-1.0, 0.0, 3.0]);
        fs::write(&flow, "v0,v1,value\n2,1,3.0\n").unwrap();
        assert!(read_edge_flow(&flow, &c).is_err());

        let out = dir.path().join("o.csv");
        write_signal(&out, &c, &s).unwrap();
        assert_eq!(read_signal(&out, &c).unwrap(), s);
    }
}
