//! Embedded benchmark instances: the hard knapsack problems with their
//! Frobenius numbers, published cone counts where available, and the random
//! high-dimension cones used by the cone-count benchmark.
//!
//! There is no prob9 vector to embed: its coefficient vector was never
//! published alongside the others, only its cone counts.

/// A named knapsack instance. `frobenius` is the claimed Frobenius number;
/// `published_nl` is the published total count of unimodular cones for the
/// full decomposition, when reported.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: &'static str,
    pub a: &'static [u64],
    pub frobenius: Option<u64>,
    pub published_nl: Option<u64>,
}

pub const CUWW: &[Instance] = &[
    Instance {
        name: "cuww4",
        a: &[13211, 13212, 39638, 52844, 66060, 79268, 92482],
        frobenius: Some(104723595),
        published_nl: Some(1036),
    },
    Instance {
        name: "cuww5",
        a: &[13429, 26850, 26855, 40280, 40281, 53711, 53714, 67141],
        frobenius: Some(45094583),
        published_nl: Some(5548),
    },
];

pub const PROB: &[Instance] = &[
    Instance {
        name: "prob1",
        a: &[25067, 49300, 49717, 62124, 87608, 88025, 113673, 119169],
        frobenius: Some(33367335),
        published_nl: Some(24786),
    },
    Instance {
        name: "prob2",
        a: &[11948, 23330, 30635, 44197, 92754, 123389, 136951, 140745],
        frobenius: Some(14215206),
        published_nl: Some(11072),
    },
    Instance {
        name: "prob3",
        a: &[39559, 61679, 79625, 99658, 133404, 137071, 159757, 173977],
        frobenius: Some(58424799),
        published_nl: Some(11490),
    },
    Instance {
        name: "prob4",
        a: &[48709, 55893, 62177, 65919, 86271, 87692, 102881, 109765],
        frobenius: Some(60575665),
        published_nl: Some(15438),
    },
    Instance {
        name: "prob5",
        a: &[28637, 48198, 80330, 91980, 102221, 135518, 165564, 176049],
        frobenius: Some(62442884),
        published_nl: Some(29595),
    },
    Instance {
        name: "prob6",
        a: &[20601, 40429, 40429, 45415, 53725, 61919, 64470, 69340, 78539, 95043],
        frobenius: Some(22382774),
        published_nl: Some(52916),
    },
    Instance {
        name: "prob7",
        a: &[18902, 26720, 34538, 34868, 49201, 49531, 65167, 66800, 84069, 137179],
        frobenius: Some(27267751),
        published_nl: Some(43552),
    },
    Instance {
        name: "prob8",
        a: &[17035, 45529, 48317, 48506, 86120, 100178, 112464, 115819, 125128, 129688],
        frobenius: Some(21733990),
        published_nl: Some(139188),
    },
    Instance {
        name: "prob10",
        a: &[45276, 70778, 86911, 92634, 97839, 125941, 134269, 141033, 147279, 153525],
        frobenius: Some(106925261),
        published_nl: Some(53766),
    },
    Instance {
        name: "prob11",
        a: &[11615, 27638, 32124, 48384, 53542, 56230, 73104, 73884, 112951, 130204],
        frobenius: Some(577134),
        published_nl: Some(4455683),
    },
    Instance {
        name: "prob12",
        a: &[14770, 32480, 75923, 86053, 85747, 91772, 101240, 115403, 137390, 147371],
        frobenius: Some(944183),
        published_nl: Some(6961202),
    },
    Instance {
        name: "prob13",
        a: &[15167, 28569, 36170, 55419, 70945, 74926, 95821, 109046, 121581, 137695],
        frobenius: Some(765260),
        published_nl: Some(6085420),
    },
    Instance {
        name: "prob14",
        a: &[11828, 14253, 46209, 52042, 55987, 72649, 119704, 129334, 135589, 138360],
        frobenius: Some(680230),
        published_nl: Some(7026995),
    },
    Instance {
        name: "prob15",
        a: &[13128, 37469, 39391, 41928, 53433, 59283, 81669, 95339, 110593, 131989],
        frobenius: Some(663281),
        published_nl: Some(5183979),
    },
    Instance {
        name: "prob16",
        a: &[35113, 36869, 46647, 53560, 81518, 85287, 102780, 115459, 146791, 147097],
        frobenius: Some(1109710),
        published_nl: Some(4921562),
    },
    Instance {
        name: "prob17",
        a: &[14054, 22184, 29952, 64696, 92752, 97364, 118723, 119355, 122370, 140050],
        frobenius: Some(752109),
        published_nl: Some(6519150),
    },
    Instance {
        name: "prob18",
        a: &[20303, 26239, 33733, 47223, 55486, 93776, 119372, 136158, 136989, 148851],
        frobenius: Some(783879),
        published_nl: Some(6450759),
    },
    Instance {
        name: "prob19",
        a: &[20212, 30662, 31420, 49259, 49701, 62688, 74254, 77244, 139477, 142101],
        frobenius: Some(677347),
        published_nl: Some(6041508),
    },
    Instance {
        name: "prob20",
        a: &[32663, 41286, 44549, 45674, 95772, 111887, 117611, 117763, 141840, 149740],
        frobenius: Some(1037608),
        published_nl: Some(6527133),
    },
];

/// The random knapsack cones of the high-dimension table; counts refer to the
/// decomposition of the single cone indexed by the first entry.
pub const TABLE1: &[Instance] = &[
    Instance {
        name: "t1-n9-a",
        a: &[1285, 2549, 2209, 2402, 2018, 2789, 1181, 2369, 121],
        frobenius: None,
        published_nl: Some(10342),
    },
    Instance {
        name: "t1-n9-b",
        a: &[1565, 2594, 2882, 2988, 2876, 544, 1621, 740, 2372],
        frobenius: None,
        published_nl: Some(11063),
    },
    Instance {
        name: "t1-n10-a",
        a: &[422, 1980, 2478, 1360, 2179, 1992, 2857, 1326, 78, 2421],
        frobenius: None,
        published_nl: Some(8117),
    },
    Instance {
        name: "t1-n10-b",
        a: &[2937, 600, 2895, 538, 584, 2175, 1636, 2942, 1905, 509],
        frobenius: None,
        published_nl: Some(40591),
    },
    Instance {
        name: "t1-n11-a",
        a: &[681, 640, 1082, 2115, 2937, 965, 2690, 1572, 701, 596, 224],
        frobenius: None,
        published_nl: Some(22747),
    },
    Instance {
        name: "t1-n11-b",
        a: &[1576, 2362, 226, 2059, 2078, 2694, 1824, 1320, 1908, 2968, 1547],
        frobenius: None,
        published_nl: Some(29749),
    },
    Instance {
        name: "t1-n12-a",
        a: &[1439, 799, 2358, 241, 743, 2370, 2188, 1713, 1114, 783, 922, 1124],
        frobenius: None,
        published_nl: Some(75889),
    },
    Instance {
        name: "t1-n12-b",
        a: &[2934, 1928, 2894, 1687, 2542, 2633, 662, 2545, 1184, 1250, 2357, 1539],
        frobenius: None,
        published_nl: Some(106726),
    },
    Instance {
        name: "t1-n13-a",
        a: &[951, 1249, 1796, 2396, 1838, 728, 930, 1266, 196, 2353, 701, 1906, 1301],
        frobenius: None,
        published_nl: Some(56259),
    },
    Instance {
        name: "t1-n13-b",
        a: &[2097, 1020, 2525, 628, 1080, 581, 2709, 1322, 149, 1125, 2309, 1210, 1878],
        frobenius: None,
        published_nl: Some(291075),
    },
    Instance {
        name: "t1-n14-a",
        a: &[1300, 1340, 2934, 1188, 1696, 1716, 67, 167, 2390, 950, 1218, 1201, 2757, 2584],
        frobenius: None,
        published_nl: Some(256285),
    },
    Instance {
        name: "t1-n14-b",
        a: &[2800, 631, 608, 2136, 2925, 163, 628, 1387, 1337, 2370, 2226, 2562, 1550, 739],
        frobenius: None,
        published_nl: Some(833283),
    },
    Instance {
        name: "t1-n15-a",
        a: &[758, 148, 1880, 43, 281, 2169, 528, 243, 1589, 1187, 1145, 290, 268, 2643, 317],
        frobenius: None,
        published_nl: Some(215849),
    },
    Instance {
        name: "t1-n15-b",
        a: &[2841, 438, 775, 2129, 2919, 1284, 1374, 613, 2917, 674, 1740, 843, 1834, 1314, 924],
        frobenius: None,
        published_nl: Some(1349790),
    },
];

/// Look up a builtin suite by name.
pub fn builtin_suite(name: &str) -> Option<Vec<Instance>> {
    match name {
        "builtin:cuww" => Some(CUWW.to_vec()),
        "builtin:prob" => Some(PROB.to_vec()),
        "builtin:random-table1" => Some(TABLE1.to_vec()),
        _ => None,
    }
}

/// The Frobenius-check instances with at most eight parts (the fast set).
pub fn frobenius_fast_suite() -> Vec<Instance> {
    CUWW.iter()
        .chain(PROB.iter())
        .filter(|i| i.a.len() <= 8 && i.frobenius.is_some())
        .cloned()
        .collect()
}

pub fn find_instance(name: &str) -> Option<Instance> {
    CUWW.iter()
        .chain(PROB.iter())
        .chain(TABLE1.iter())
        .find(|i| i.name == name)
        .cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_well_formed() {
        // 21 hard instances (cuww + prob, no prob9), 14 random cones
        assert_eq!(CUWW.len() + PROB.len(), 21);
        assert_eq!(TABLE1.len(), 14);
        assert!(PROB.iter().all(|i| i.name != "prob9"));
        for i in CUWW.iter().chain(PROB.iter()).chain(TABLE1.iter()) {
            let g = i.a.iter().fold(0u64, |g, &x| num_integer::gcd(g, x));
            assert_eq!(g, 1, "{} does not have gcd 1", i.name);
        }
        assert_eq!(frobenius_fast_suite().len(), 7);
        assert!(builtin_suite("builtin:cuww").is_some());
        assert!(builtin_suite("nope").is_none());
    }
}
