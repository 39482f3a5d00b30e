//! Site partition of a graph, derived from a URL-per-node map.
//!
//! Sites are identified by the URL host (lowercased, port stripped).
//! Nodes whose URL cannot be parsed each form a singleton site.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Partition of the node set into sites. Every node belongs to exactly
/// one site; member lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteMap {
    site_of: Vec<u32>,
    members: Vec<Vec<NodeId>>,
    unparsable: usize,
}

impl SiteMap {
    /// Build a partition directly from per-node site assignments.
    pub fn from_assignments(site_of: Vec<u32>) -> Result<Self> {
        let site_count = site_of.iter().map(|&s| s as usize + 1).max().unwrap_or(0);
        let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); site_count];
        for (v, &s) in site_of.iter().enumerate() {
            members[s as usize].push(v as NodeId);
        }
        if members.iter().any(|m| m.is_empty()) {
            return Err(Error::Precondition(
                "site ids must be dense: every site needs at least one member".into(),
            ));
        }
        Ok(SiteMap {
            site_of,
            members,
            unparsable: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.site_of.len()
    }

    pub fn site_count(&self) -> usize {
        self.members.len()
    }

    pub fn site_of(&self, v: NodeId) -> u32 {
        self.site_of[v as usize]
    }

    pub fn members(&self, site: u32) -> &[NodeId] {
        &self.members[site as usize]
    }

    /// Number of URLs that failed to parse during [`load_site_map`].
    pub fn unparsable_count(&self) -> usize {
        self.unparsable
    }
}

/// Read one URL per line (line `k` belongs to node `k`) and group nodes
/// by host. The line count must equal the graph's node count.
pub fn load_site_map(path: &Path, g: &DirectedGraph) -> Result<SiteMap> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let n = g.node_count();
    let mut site_of = Vec::with_capacity(n);
    let mut by_host: HashMap<String, u32> = HashMap::new();
    let mut next_site = 0u32;
    let mut unparsable = 0usize;

    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if site_of.len() == n {
            return Err(Error::Shape(format!(
                "{} has more than {n} lines",
                path.display()
            )));
        }
        // Url::parse lowercases the host and host_str() carries no port.
        let host = url::Url::parse(line.trim())
            .ok()
            .and_then(|u| u.host_str().map(str::to_owned));
        let site = match host {
            Some(h) => *by_host.entry(h).or_insert_with(|| {
                let s = next_site;
                next_site += 1;
                s
            }),
            None => {
                unparsable += 1;
                let s = next_site;
                next_site += 1;
                s
            }
        };
        site_of.push(site);
    }
    if site_of.len() != n {
        return Err(Error::Shape(format!(
            "{} has {} lines, graph has {n} nodes",
            path.display(),
            site_of.len()
        )));
    }

    let mut map = SiteMap::from_assignments(site_of)?;
    map.unparsable = unparsable;
    Ok(map)
}

/// URL emitted for synthetic datasets: node `j` of site `k`.
pub fn synthetic_url(site: u32, node: NodeId) -> String {
    format!("http://site{site}.test/page{node}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn graph(n: usize) -> DirectedGraph {
        DirectedGraph::from_edges(n, &[], true).unwrap()
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn groups_by_host() {
        let f = write_tmp("http://a.uk/x\nhttp://a.uk/y\nhttp://b.uk/\n");
        let map = load_site_map(f.path(), &graph(3)).unwrap();
        assert_eq!(map.site_count(), 2);
        assert_eq!(map.members(0), &[0, 1]);
        assert_eq!(map.members(1), &[2]);
    }

    #[test]
    fn host_normalization() {
        let f = write_tmp("HTTP://A.uk:80/z\nhttp://a.uk/w\n");
        let map = load_site_map(f.path(), &graph(2)).unwrap();
        assert_eq!(map.site_count(), 1);
        assert_eq!(map.site_of(0), map.site_of(1));
    }

    #[test]
    fn line_count_mismatch() {
        let f = write_tmp("http://a.uk/\n");
        match load_site_map(f.path(), &graph(2)) {
            Err(Error::Shape(_)) => {}
            other => panic!("expected shape error, got {other:?}"),
        }
    }

    #[test]
    fn unparsable_urls_become_singletons() {
        let f = write_tmp("not a url\nhttp://a.uk/\nmailto:x@y\n");
        let map = load_site_map(f.path(), &graph(3)).unwrap();
        assert_eq!(map.unparsable_count(), 2);
        assert_eq!(map.site_count(), 3);
        assert_ne!(map.site_of(0), map.site_of(2));
    }

    #[test]
    fn every_node_exactly_one_site() {
        let f = write_tmp("http://a.uk/1\nhttp://b.uk/1\nhttp://a.uk/2\nhttp://c.uk/\n");
        let map = load_site_map(f.path(), &graph(4)).unwrap();
        let mut covered = [false; 4];
        for s in 0..map.site_count() as u32 {
            for &v in map.members(s) {
                assert!(!covered[v as usize], "node {v} in two sites");
                covered[v as usize] = true;
                assert_eq!(map.site_of(v), s);
            }
        }
        assert!(covered.iter().all(|&c| c));
    }
}
