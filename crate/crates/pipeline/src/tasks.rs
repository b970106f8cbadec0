use std::fmt;
use std::str::FromStr;

use graphwm_core::catalog::CatalogKey;
use graphwm_core::{Predicate, Representation};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    Web,
    Social,
    Transportation,
    Citation,
}

impl Domain {
    pub const ALL: [Domain; 4] = [Domain::Web, Domain::Social, Domain::Transportation, Domain::Citation];

    pub fn predicate(self) -> Predicate {
        match self {
            Domain::Web => Predicate::Linked,
            Domain::Social => Predicate::Followed,
            Domain::Transportation => Predicate::Connected,
            Domain::Citation => Predicate::Cited,
        }
    }

    /// Hyperlinks and citations point one way; friendships and roads do not.
    pub fn directed(self) -> bool {
        matches!(self, Domain::Web | Domain::Citation)
    }

    pub fn scenarios(self) -> [&'static str; 5] {
        match self {
            Domain::Social => [
                "Information diffusion analysis",
                "Community detection and recommendation systems",
                "Fraudulent account detection",
                "Influence maximization algorithms",
                "Social network dynamics analysis",
            ],
            Domain::Web => [
                "Web crawler efficiency optimization",
                "Search engine ranking optimization",
                "Web structural integrity diagnosis",
                "Topical community discovery",
                "DDoS attack mitigation",
            ],
            Domain::Transportation => [
                "Travel route planning",
                "Logistics delivery optimization",
                "Urban emergency response planning",
                "Public transit network scheduling",
                "Shared mobility platforms",
            ],
            Domain::Citation => [
                "Scholarly influence tracking",
                "Interdisciplinary research identification",
                "Seminal paper discovery",
                "Literature retrieval ranking optimization",
                "Research frontier identification",
            ],
        }
    }

    /// (singular entity, plural entity, plural relation)
    pub fn nouns(self) -> (&'static str, &'static str, &'static str) {
        match self {
            Domain::Web => ("page", "pages", "hyperlinks"),
            Domain::Social => ("user", "users", "follow relations"),
            Domain::Transportation => ("intersection", "intersections", "road segments"),
            Domain::Citation => ("paper", "papers", "citations"),
        }
    }

    pub fn index(self) -> usize {
        Domain::ALL.iter().position(|&d| d == self).unwrap()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Domain {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Domain::ALL
            .into_iter()
            .find(|d| d.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown domain `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Accuracy,
    Mae,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskClass {
    Structural,
    InToolsetAlgorithmic,
    OutToolsetAlgorithmic,
    Predictive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskKind {
    EdgeCount,
    NodeCount,
    DegreeCount,
    EdgeExistence,
    NodeExistence,
    CycleDetection,
    TriangleCount,
    PathExistence,
    ShortestPath,
    MaxFlow,
    Diameter,
    MaxCore,
    ConnectedComponents,
    CommonNeighbors,
    PageRank,
    ReferenceMatch,
    ClusteringCoefficient,
    TrafficPrediction,
    SocialLinkPrediction,
    WebLinkPrediction,
    NodeClassification,
}

/// How the pipeline is expected to answer a kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Tool(&'static str),
    Model(CatalogKey),
}

impl TaskKind {
    pub const ALL: [TaskKind; 21] = [
        TaskKind::EdgeCount,
        TaskKind::NodeCount,
        TaskKind::DegreeCount,
        TaskKind::EdgeExistence,
        TaskKind::NodeExistence,
        TaskKind::CycleDetection,
        TaskKind::TriangleCount,
        TaskKind::PathExistence,
        TaskKind::ShortestPath,
        TaskKind::MaxFlow,
        TaskKind::Diameter,
        TaskKind::MaxCore,
        TaskKind::ConnectedComponents,
        TaskKind::CommonNeighbors,
        TaskKind::PageRank,
        TaskKind::ReferenceMatch,
        TaskKind::ClusteringCoefficient,
        TaskKind::TrafficPrediction,
        TaskKind::SocialLinkPrediction,
        TaskKind::WebLinkPrediction,
        TaskKind::NodeClassification,
    ];

    pub fn class(self) -> TaskClass {
        use TaskKind::*;
        match self {
            EdgeCount | NodeCount | DegreeCount | EdgeExistence | NodeExistence => TaskClass::Structural,
            CycleDetection | TriangleCount | PathExistence | ShortestPath => TaskClass::InToolsetAlgorithmic,
            MaxFlow | Diameter | MaxCore | ConnectedComponents | CommonNeighbors | PageRank | ReferenceMatch
            | ClusteringCoefficient => TaskClass::OutToolsetAlgorithmic,
            TrafficPrediction | SocialLinkPrediction | WebLinkPrediction | NodeClassification => TaskClass::Predictive,
        }
    }

    pub fn in_toolset(self) -> bool {
        matches!(self.class(), TaskClass::Structural | TaskClass::InToolsetAlgorithmic)
    }

    pub fn deterministic(self) -> bool {
        self.class() != TaskClass::Predictive
    }

    pub fn exclusive_domain(self) -> Option<Domain> {
        use TaskKind::*;
        match self {
            MaxFlow | Diameter | TrafficPrediction => Some(Domain::Transportation),
            MaxCore | ConnectedComponents | SocialLinkPrediction => Some(Domain::Social),
            CommonNeighbors | PageRank | WebLinkPrediction => Some(Domain::Web),
            ReferenceMatch | ClusteringCoefficient | NodeClassification => Some(Domain::Citation),
            _ => None,
        }
    }

    pub fn valid_for(self, domain: Domain) -> bool {
        self.exclusive_domain().is_none_or(|d| d == domain)
    }

    pub fn metric(self) -> Metric {
        if self == TaskKind::TrafficPrediction {
            Metric::Mae
        } else {
            Metric::Accuracy
        }
    }

    pub fn weighted(self) -> bool {
        matches!(self, TaskKind::ShortestPath | TaskKind::MaxFlow | TaskKind::Diameter)
    }

    pub fn route(self) -> Route {
        use TaskKind::*;
        match self {
            EdgeCount => Route::Tool("edge_count"),
            NodeCount => Route::Tool("node_count"),
            DegreeCount => Route::Tool("degree_count"),
            EdgeExistence => Route::Tool("edge_existence"),
            NodeExistence => Route::Tool("node_existence"),
            CycleDetection => Route::Tool("cycle_detection"),
            TriangleCount => Route::Tool("triangle_count"),
            PathExistence => Route::Tool("path_existence"),
            ShortestPath => Route::Tool("shortest_path"),
            MaxFlow => Route::Model(CatalogKey::MaxFlow),
            Diameter => Route::Model(CatalogKey::Diameter),
            MaxCore => Route::Model(CatalogKey::MaxCore),
            ConnectedComponents => Route::Model(CatalogKey::ConnectedComponents),
            CommonNeighbors => Route::Model(CatalogKey::CommonNeighbors),
            PageRank => Route::Model(CatalogKey::PageRank),
            ReferenceMatch => Route::Model(CatalogKey::ReferenceMatch),
            ClusteringCoefficient => Route::Model(CatalogKey::ClusteringCoefficient),
            TrafficPrediction => Route::Model(CatalogKey::TrafficPredictionBaseline),
            SocialLinkPrediction | WebLinkPrediction => Route::Model(CatalogKey::LinkPredictionBaseline),
            NodeClassification => Route::Model(CatalogKey::NodeClassificationBaseline),
        }
    }

    pub fn index(self) -> usize {
        TaskKind::ALL.iter().position(|&k| k == self).unwrap()
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for TaskKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let wanted: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        TaskKind::ALL
            .into_iter()
            .find(|k| k.to_string().eq_ignore_ascii_case(&wanted))
            .ok_or_else(|| format!("unknown task kind `{s}`"))
    }
}

/// The linguistic representation for a domain uses its fixed predicate.
pub fn linguistic_for(domain: Domain) -> Representation {
    Representation::linguistic(domain.predicate())
}
