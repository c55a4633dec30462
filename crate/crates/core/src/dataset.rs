//! Country and submarine-cable datasets, plus the adjacency relation the
//! routing stage walks over.
//!
//! All tables are plain comma-separated text with a one-line header:
//!
//! * `countries.csv`: `id,name,sub_region,lat,lon,population,dc_count`
//! * `cables.csv`: `name,countries` where `countries` is a `;`-separated id
//!   list. A token may carry a landing multiplicity as `id:n` when one cable
//!   system lands more than once in the same country; a bare id counts once.
//! * `borders.csv` / `maritime.csv`: `a,b`, one undirected edge per row.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bundled reference tables.
pub mod reference {
    pub const COUNTRIES_CSV: &str = include_str!("../data/countries.csv");
    pub const CABLES_CSV: &str = include_str!("../data/cables.csv");
    pub const BORDERS_CSV: &str = include_str!("../data/borders.csv");
    pub const MARITIME_CSV: &str = include_str!("../data/maritime.csv");
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(Error::Validation(format!("latitude {lat} outside [-90, 90]")));
        }
        if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::Validation(format!("longitude {lon} outside [-180, 180]")));
        }
        Ok(GeoPoint { lat, lon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SubRegion {
    Central,
    Eastern,
    Northern,
    Southern,
    Western,
}

impl SubRegion {
    pub const ALL: [SubRegion; 5] = [
        SubRegion::Central,
        SubRegion::Eastern,
        SubRegion::Northern,
        SubRegion::Southern,
        SubRegion::Western,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SubRegion::Central => "Central",
            SubRegion::Eastern => "Eastern",
            SubRegion::Northern => "Northern",
            SubRegion::Southern => "Southern",
            SubRegion::Western => "Western",
        }
    }
}

impl fmt::Display for SubRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SubRegion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_suffix(" Africa").unwrap_or(s);
        SubRegion::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown sub-region `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Country {
    pub id: String,
    pub name: String,
    pub sub_region: SubRegion,
    pub centroid: GeoPoint,
    pub population: u64,
    pub dc_count: u32,
    /// Independent submarine-cable landings; zero until joined with cable data.
    pub landings: u32,
}

/// An ordered, id-indexed set of countries.
#[derive(Debug, Clone, Default)]
pub struct CountryDataset {
    countries: Vec<Country>,
    index: HashMap<String, usize>,
}

impl CountryDataset {
    pub fn new(countries: Vec<Country>) -> Result<Self> {
        let mut index = HashMap::with_capacity(countries.len());
        for (i, c) in countries.iter().enumerate() {
            if index.insert(c.id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate country id `{}`", c.id)));
            }
        }
        Ok(CountryDataset { countries, index })
    }

    /// The bundled 55-country table joined with the bundled cable landings.
    pub fn reference() -> Self {
        let mut ds = load_countries(reference::COUNTRIES_CSV.as_bytes())
            .expect("bundled countries.csv is valid");
        let cables =
            load_cables(reference::CABLES_CSV.as_bytes()).expect("bundled cables.csv is valid");
        ds.set_landings(&landings_per_country(&cables));
        ds
    }

    pub fn len(&self) -> usize {
        self.countries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_empty()
    }

    pub fn countries(&self) -> &[Country] {
        &self.countries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Country> {
        self.countries.iter()
    }

    pub fn ids(&self) -> Vec<String> {
        self.countries.iter().map(|c| c.id.clone()).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&Country> {
        self.index_of(id).map(|i| &self.countries[i])
    }

    pub fn require(&self, id: &str) -> Result<&Country> {
        self.get(id).ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    /// Overwrites every country's landing count; ids absent from `landings`
    /// get zero, ids absent from the dataset are ignored.
    pub fn set_landings(&mut self, landings: &BTreeMap<String, u32>) {
        for c in &mut self.countries {
            c.landings = landings.get(&c.id).copied().unwrap_or(0);
        }
    }

    pub fn landings(&self) -> BTreeMap<String, u32> {
        self.countries
            .iter()
            .filter(|c| c.landings > 0)
            .map(|c| (c.id.clone(), c.landings))
            .collect()
    }
}

fn parse_err(source_name: &str, row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        row,
        message: message.into(),
    }
}

fn csv_reader<R: Read>(src: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(src)
}

fn check_header<R: Read>(
    rdr: &mut csv::Reader<R>,
    source_name: &str,
    expected: &[&str],
) -> Result<bool> {
    let header = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(parse_err(source_name, 1, e.to_string())),
    };
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Ok(false);
    }
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(parse_err(
            source_name,
            1,
            format!("expected header `{}`, got `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(true)
}

/// Parses a countries table. Row numbers in errors are 1-based file lines.
pub fn load_countries<R: Read>(src: R) -> Result<CountryDataset> {
    const NAME: &str = "countries.csv";
    let mut rdr = csv_reader(src);
    if !check_header(
        &mut rdr,
        NAME,
        &["id", "name", "sub_region", "lat", "lon", "population", "dc_count"],
    )? {
        return Ok(CountryDataset::default());
    }
    let mut countries = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| parse_err(NAME, row, e.to_string()))?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let num = |j: usize, what: &str| -> Result<f64> {
            field(j)
                .parse::<f64>()
                .map_err(|_| parse_err(NAME, row, format!("bad {what} `{}`", field(j))))
        };
        let id = field(0).to_string();
        if id.is_empty() {
            return Err(parse_err(NAME, row, "empty id"));
        }
        let sub_region = field(2)
            .parse::<SubRegion>()
            .map_err(|e| parse_err(NAME, row, e.to_string()))?;
        let centroid = GeoPoint::new(num(3, "latitude")?, num(4, "longitude")?)
            .map_err(|e| Error::Validation(format!("{NAME} row {row}: {e}")))?;
        let population = field(5)
            .parse::<u64>()
            .map_err(|_| parse_err(NAME, row, format!("bad population `{}`", field(5))))?;
        let dc_count = field(6)
            .parse::<u32>()
            .map_err(|_| parse_err(NAME, row, format!("bad dc_count `{}`", field(6))))?;
        countries.push(Country {
            id,
            name: field(1).to_string(),
            sub_region,
            centroid,
            population,
            dc_count,
            landings: 0,
        });
    }
    CountryDataset::new(countries)
}

pub fn load_countries_path(path: &Path) -> Result<CountryDataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_countries(file)
}

/// Writes a dataset back out in the `countries.csv` schema.
pub fn export_countries(ds: &CountryDataset) -> String {
    let mut out = String::from("id,name,sub_region,lat,lon,population,dc_count\n");
    for c in ds.iter() {
        let name = if c.name.contains(',') || c.name.contains('"') {
            format!("\"{}\"", c.name.replace('"', "\"\""))
        } else {
            c.name.clone()
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.id, name, c.sub_region, c.centroid.lat, c.centroid.lon, c.population, c.dc_count
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CableRecord {
    pub name: String,
    /// Touched country ids, in file order, without duplicates.
    pub countries_touched: Vec<String>,
    /// Landings of this system per touched country (parallel to `countries_touched`).
    pub landings: Vec<u32>,
}

impl CableRecord {
    /// Ids this record touches that are not in `ds`.
    pub fn unresolved<'a>(&'a self, ds: &'a CountryDataset) -> impl Iterator<Item = &'a str> {
        self.countries_touched
            .iter()
            .filter(|id| ds.get(id).is_none())
            .map(String::as_str)
    }
}

pub fn load_cables<R: Read>(src: R) -> Result<Vec<CableRecord>> {
    const NAME: &str = "cables.csv";
    let mut rdr = csv_reader(src);
    if !check_header(&mut rdr, NAME, &["name", "countries"])? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| parse_err(NAME, row, e.to_string()))?;
        let name = rec.get(0).unwrap_or("").to_string();
        if name.is_empty() {
            return Err(parse_err(NAME, row, "empty cable name"));
        }
        let mut touched: Vec<String> = Vec::new();
        let mut landings: Vec<u32> = Vec::new();
        for token in rec.get(1).unwrap_or("").split(';') {
            let token = token.trim();
            if token.is_empty() {
                continue;
            }
            let (id, count) = match token.split_once(':') {
                Some((id, n)) => {
                    let n = n.trim().parse::<u32>().ok().filter(|&n| n >= 1).ok_or_else(|| {
                        parse_err(NAME, row, format!("bad landing multiplicity in `{token}`"))
                    })?;
                    (id.trim(), n)
                }
                None => (token, 1),
            };
            match touched.iter().position(|t| t == id) {
                Some(j) => landings[j] += count,
                None => {
                    touched.push(id.to_string());
                    landings.push(count);
                }
            }
        }
        out.push(CableRecord {
            name,
            countries_touched: touched,
            landings,
        });
    }
    Ok(out)
}

pub fn load_cables_path(path: &Path) -> Result<Vec<CableRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_cables(file)
}

/// Total independent landings per country across all cable records.
pub fn landings_per_country(cables: &[CableRecord]) -> BTreeMap<String, u32> {
    let mut out = BTreeMap::new();
    for rec in cables {
        for (id, n) in rec.countries_touched.iter().zip(&rec.landings) {
            *out.entry(id.clone()).or_insert(0) += n;
        }
    }
    out
}

pub type Link = (String, String);

/// Parses a `borders.csv`/`maritime.csv` style edge list.
pub fn load_links<R: Read>(src: R, source_name: &str) -> Result<Vec<Link>> {
    let mut rdr = csv_reader(src);
    if !check_header(&mut rdr, source_name, &["a", "b"])? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| parse_err(source_name, row, e.to_string()))?;
        let (a, b) = (rec.get(0).unwrap_or(""), rec.get(1).unwrap_or(""));
        if a.is_empty() || b.is_empty() {
            return Err(parse_err(source_name, row, "empty endpoint"));
        }
        if a == b {
            return Err(parse_err(source_name, row, format!("self-loop on `{a}`")));
        }
        out.push((a.to_string(), b.to_string()));
    }
    Ok(out)
}

pub fn load_links_path(path: &Path) -> Result<Vec<Link>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    load_links(file, &name)
}

pub fn reference_borders() -> Vec<Link> {
    load_links(reference::BORDERS_CSV.as_bytes(), "borders.csv").expect("bundled borders.csv")
}

pub fn reference_maritime() -> Vec<Link> {
    load_links(reference::MARITIME_CSV.as_bytes(), "maritime.csv").expect("bundled maritime.csv")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjacencyMode {
    Borders,
    Complete,
}

impl FromStr for AdjacencyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "borders" => Ok(AdjacencyMode::Borders),
            "complete" => Ok(AdjacencyMode::Complete),
            other => Err(Error::Parameter(format!(
                "adjacency must be `borders` or `complete`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for AdjacencyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdjacencyMode::Borders => "borders",
            AdjacencyMode::Complete => "complete",
        })
    }
}

/// Undirected simple graph over country ids.
#[derive(Debug, Clone)]
pub struct AdjacencyGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    neighbors: Vec<BTreeSet<usize>>,
    mode: AdjacencyMode,
}

impl AdjacencyGraph {
    fn empty(nodes: Vec<String>, mode: AdjacencyMode) -> Self {
        let index = nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let neighbors = vec![BTreeSet::new(); nodes.len()];
        AdjacencyGraph {
            nodes,
            index,
            neighbors,
            mode,
        }
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.neighbors[a].insert(b);
            self.neighbors[b].insert(a);
        }
    }

    pub fn complete(nodes: Vec<String>) -> Self {
        let mut g = AdjacencyGraph::empty(nodes, AdjacencyMode::Complete);
        let n = g.nodes.len();
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Graph over `nodes` with the given undirected edges.
    pub fn from_edges(nodes: Vec<String>, edges: &[Link]) -> Result<Self> {
        let mut g = AdjacencyGraph::empty(nodes, AdjacencyMode::Borders);
        if g.index.len() != g.nodes.len() {
            return Err(Error::Validation("duplicate node in graph".into()));
        }
        for (a, b) in edges {
            let ia = *g.index.get(a).ok_or_else(|| Error::UnknownId(a.clone()))?;
            let ib = *g.index.get(b).ok_or_else(|| Error::UnknownId(b.clone()))?;
            if ia == ib {
                return Err(Error::Validation(format!("self-loop on `{a}`")));
            }
            g.add_edge(ia, ib);
        }
        Ok(g)
    }

    pub fn mode(&self) -> AdjacencyMode {
        self.mode
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Neighbour indices of node `i`, ascending.
    pub fn neighbor_indices(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors[i].iter().copied()
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&a), Some(&b)) => self.neighbors[a].contains(&b),
            _ => false,
        }
    }

    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = &str> {
        self.index
            .get(id)
            .into_iter()
            .flat_map(move |&i| self.neighbors[i].iter().map(move |&j| self.nodes[j].as_str()))
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(a, b)` with `a` before `b` in node order.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, ns) in self.neighbors.iter().enumerate() {
            for &b in ns.range(a + 1..) {
                out.push((self.nodes[a].as_str(), self.nodes[b].as_str()));
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbors[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Subgraph induced by `ids` (node order follows `ids`).
    pub fn induced(&self, ids: &[String]) -> Result<AdjacencyGraph> {
        let mut g = AdjacencyGraph::empty(ids.to_vec(), self.mode);
        for (a, id_a) in ids.iter().enumerate() {
            let ia = *self.index.get(id_a).ok_or_else(|| Error::UnknownId(id_a.clone()))?;
            for (b, id_b) in ids.iter().enumerate().skip(a + 1) {
                let ib = *self.index.get(id_b).ok_or_else(|| Error::UnknownId(id_b.clone()))?;
                if self.neighbors[ia].contains(&ib) {
                    g.add_edge(a, b);
                }
            }
        }
        Ok(g)
    }
}

/// Builds the adjacency relation. In borders mode, border rows naming
/// countries outside the dataset are skipped so the bundled table works on
/// subsets; maritime endpoints must resolve.
pub fn build_adjacency(
    ds: &CountryDataset,
    mode: AdjacencyMode,
    borders: &[Link],
    maritime: &[Link],
) -> Result<AdjacencyGraph> {
    for (a, b) in maritime {
        ds.require(a)?;
        ds.require(b)?;
    }
    if mode == AdjacencyMode::Complete {
        return Ok(AdjacencyGraph::complete(ds.ids()));
    }
    let mut g = AdjacencyGraph::empty(ds.ids(), AdjacencyMode::Borders);
    for (a, b) in borders {
        if let (Some(ia), Some(ib)) = (ds.index_of(a), ds.index_of(b)) {
            g.add_edge(ia, ib);
        }
    }
    for (a, b) in maritime {
        let (ia, ib) = (ds.index_of(a).unwrap(), ds.index_of(b).unwrap());
        if ia == ib {
            return Err(Error::Validation(format!("maritime self-loop on `{a}`")));
        }
        g.add_edge(ia, ib);
    }
    Ok(g)
}

/// Borders mode uses the bundled border and maritime tables.
pub fn reference_adjacency(ds: &CountryDataset, mode: AdjacencyMode) -> Result<AdjacencyGraph> {
    build_adjacency(ds, mode, &reference_borders(), &reference_maritime())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nigeria_row() {
        let src = "id,name,sub_region,lat,lon,population,dc_count\n\
                   nigeria,Nigeria,Western,9.5941,8.0894,200963599,10\n";
        let ds = load_countries(src.as_bytes()).unwrap();
        let ng = ds.get("nigeria").unwrap();
        assert_eq!(ng.dc_count, 10);
        assert_eq!(ng.population, 200_963_599);
        assert_eq!(ng.sub_region, SubRegion::Western);
    }

    #[test]
    fn empty_stream_is_empty_dataset() {
        assert!(load_countries("".as_bytes()).unwrap().is_empty());
        let header_only = "id,name,sub_region,lat,lon,population,dc_count\n";
        assert!(load_countries(header_only.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn malformed_row_reports_row_number() {
        let src = "id,name,sub_region,lat,lon,population,dc_count\n\
                   a,A,Western,1,2,3,4\n\
                   b,B,Western,1,x,3,4\n";
        match load_countries(src.as_bytes()) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_and_bad_coordinate_are_validation_errors() {
        let dup = "id,name,sub_region,lat,lon,population,dc_count\n\
                   a,A,Western,1,2,3,4\na,A2,Western,1,2,3,4\n";
        assert!(matches!(load_countries(dup.as_bytes()), Err(Error::Validation(_))));
        let bad = "id,name,sub_region,lat,lon,population,dc_count\na,A,Western,95,2,3,4\n";
        assert!(matches!(load_countries(bad.as_bytes()), Err(Error::Validation(_))));
    }

    #[test]
    fn reference_dataset_shape() {
        let ds = CountryDataset::reference();
        assert_eq!(ds.len(), 55);
        assert!(ds.get("western_sahara").is_some());
        // Sum of the DC column as printed in the reference table.
        assert_eq!(ds.iter().map(|c| c.dc_count).sum::<u32>(), 74);
    }

    #[test]
    fn reference_round_trips_bit_exact() {
        let ds = load_countries(reference::COUNTRIES_CSV.as_bytes()).unwrap();
        assert_eq!(export_countries(&ds), reference::COUNTRIES_CSV);
    }

    #[test]
    fn cable_rows() {
        let recs = load_cables("name,countries\nTEAMS,kenya\nLonely,\n".as_bytes()).unwrap();
        assert_eq!(recs[0].countries_touched, vec!["kenya"]);
        assert!(recs[1].countries_touched.is_empty());
        assert!(matches!(
            load_cables("name,countries\nX,kenya:0\n".as_bytes()),
            Err(Error::Parse { row: 2, .. })
        ));
    }

    #[test]
    fn reference_cables_and_landings() {
        let recs = load_cables(reference::CABLES_CSV.as_bytes()).unwrap();
        assert_eq!(recs.len(), 15);
        let l = landings_per_country(&recs);
        assert_eq!(l["egypt"], 15);
        assert_eq!(l["djibouti"], 9);
        assert_eq!(l["ghana"], 3);
        assert!(landings_per_country(&[]).is_empty());
        let ds = CountryDataset::reference();
        assert!(recs.iter().all(|r| r.unresolved(&ds).next().is_none()));
    }

    #[test]
    fn complete_graph_edge_count() {
        let ds = CountryDataset::reference();
        let g = reference_adjacency(&ds, AdjacencyMode::Complete).unwrap();
        assert_eq!(g.edge_count(), 55 * 54 / 2);
    }

    #[test]
    fn borders_graph_is_connected() {
        let ds = CountryDataset::reference();
        let g = reference_adjacency(&ds, AdjacencyMode::Borders).unwrap();
        assert!(g.has_edge("benin", "nigeria"));
        assert!(g.has_edge("madagascar", "mauritius"));
        assert!(g.is_connected());
        assert!(!g.has_edge("lesotho", "lesotho"));
    }

    #[test]
    fn unresolved_maritime_endpoint_fails() {
        let ds = CountryDataset::reference();
        let links = vec![("madagascar".to_string(), "atlantis".to_string())];
        assert!(matches!(
            build_adjacency(&ds, AdjacencyMode::Borders, &[], &links),
            Err(Error::UnknownId(_))
        ));
    }
}
