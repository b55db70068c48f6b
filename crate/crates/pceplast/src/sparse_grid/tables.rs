//! Hard-coded nodes and weights of the nested Genz–Keister quadrature
//! family for the standard Gaussian weight, plus the level bookkeeping
//! that selects a rule per accuracy level.
//!
//! Each `GKnn` constant lists the positive half (node >= 0, ascending) of
//! the `nn`-point rule; full rules are recovered by reflection, and every
//! rule's nodes are literal float-subsets of the largest rule's, so
//! nestedness holds bit-exactly. Values were generated with 120-digit
//! arithmetic by `tools/gen_gk_tables.py`, which re-derives the extension
//! chain 1, 3, 9, 19, 35 (with the intermediate truncations 7, 17, 31, 33),
//! verifies symmetry, normalization, nesting, and the polynomial degree of
//! every rule, and emits these literals at 30 significant digits.
#![allow(clippy::excessive_precision)]

// positive half (including zero) of each nested rule;
// nodes are listed in increasing order.

pub(crate) const GK01: [(f64, f64); 1] = [
    (0.0, 1.0),
];

pub(crate) const GK03: [(f64, f64); 2] = [
    (0.0, 0.666666666666666666666666666667),
    (1.73205080756887729352744634151, 0.166666666666666666666666666667),
];

pub(crate) const GK07: [(f64, f64); 4] = [
    (0.0, 0.221870301717962900675863622101),
    (0.741095349994540841861796561107, 0.291814354417295448180408616191),
    (1.73205080756887729352744634151, 0.0880007757731424889653773990257),
    (2.86127957605705811733147448659, 0.0092497189505806125162821737325),
];

pub(crate) const GK09: [(f64, f64); 5] = [
    (0.0, 0.253968253968253968253968253968),
    (0.741095349994540841861796561107, 0.270074329577937870762767019924),
    (1.73205080756887729352744634151, 0.0948509485094850948509485094851),
    (2.86127957605705811733147448659, 0.00799632547089353276985526566649),
    (4.18495601767273186068890789532, 0.0000942694575565174894450779398247),
];

pub(crate) const GK17: [(f64, f64); 9] = [
    (0.0, 0.305022782648565926023131199185),
    (0.741095349994540841861796561107, 0.206356887667687195531620510545),
    (1.23042363402730600775114365003, 0.0631506024881206189919855486027),
    (1.73205080756887729352744634151, 0.0630495653401110641239162032887),
    (2.59608311504920215935784602955, 0.0187713835689766974923679676043),
    (2.86127957605705811733147448659, -0.00690636574406190014285424368796),
    (3.20533379449919451871837817631, 0.00300767901671801322099326302407),
    (4.18495601767273186068890789532, 0.0000581859886871793920552669463054),
    (5.18701603991365606599177652182, 0.000000670349478168378349884084173071),
];

pub(crate) const GK19: [(f64, f64); 10] = [
    (0.0, 0.303467199854205866431165661877),
    (0.741095349994540841861796561107, 0.208324991649608877809351337891),
    (1.23042363402730600775114365003, 0.061151730125247677114183383738),
    (1.73205080756887729352744634151, 0.0640960546868075887114700276505),
    (2.59608311504920215935784602955, 0.0180852342547984527724960724122),
    (2.86127957605705811733147448659, -0.00633722479337373585413936047407),
    (3.20533379449919451871837817631, 0.00288488043650675129122202986647),
    (4.18495601767273186068890789532, 0.0000601233694598478184990613394235),
    (5.18701603991365606599177652182, 0.000000609480873146898346039837191671),
    (6.36339449433636998763257860506, 8.62968460222988576800806179027e-10),
];

pub(crate) const GK31: [(f64, f64); 16] = [
    (0.0, -0.0133787457486537435894123590817),
    (0.248992297579960611806557803952, 0.200563279033160637735064428286),
    (0.741095349994540841861796561107, 0.145282588445521325310926645646),
    (1.23042363402730600775114365003, 0.0938323642920779496644302301165),
    (1.73205080756887729352744634151, 0.0443661358650593172484318455216),
    (2.23362606167694165200959431338, 0.0164558442615537791132600437676),
    (2.59608311504920215935784602955, 0.00238632535404093205208671503827),
    (2.86127957605705811733147448659, 0.00276900564593376789199099343667),
    (3.20533379449919451871837817631, 0.000705164882023070052349585979998),
    (3.63531851903727824521897202862, 0.000291328318544489518851356660214),
    (4.18495601767273186068890789532, 0.0000341638670090598220290940364798),
    (4.73643308595229708409872019687, 0.00000293188720914214903367384812465),
    (5.18701603991365606599177652182, 0.000000217132963744106719362541512384),
    (5.69817776848810958932964960213, 0.0000000234796611889402221827054326982),
    (6.36339449433636998763257860506, 4.05640045944687003709601872448e-10),
    (7.12210670080461665821897691566, 3.92842224462301824641766166066e-12),
];

pub(crate) const GK33: [(f64, f64); 17] = [
    (0.0, 0.000661845675851514754615051901422),
    (0.248992297579960611806557803952, 0.191666934208495069546216025567),
    (0.741095349994540841861796561107, 0.148100524727720228468798128848),
    (1.23042363402730600775114365003, 0.0923489060062447979989226543869),
    (1.73205080756887729352744634151, 0.0452836562902803388887244241298),
    (2.23362606167694165200959431338, 0.0156646516527675384295301324168),
    (2.59608311504920215935784602955, 0.00316432492206010390445346031285),
    (2.86127957605705811733147448659, 0.00230595625107365684011483322221),
    (3.20533379449919451871837817631, 0.000820333652541657597958784831582),
    (3.63531851903727824521897202862, 0.000275038559124745029520747160163),
    (4.18495601767273186068890789532, 0.0000357505134969031140135321299739),
    (4.73643308595229708409872019687, 0.00000273132161470195587905705798826),
    (5.18701603991365606599177652182, 0.000000247235086316794812122175958473),
    (5.69817776848810958932964960213, 0.0000000213572113579799810032768423938),
    (6.36339449433636998763257860506, 4.61277668320225349581796604822e-10),
    (7.12210670080461665821897691566, 3.07343102315313178818303333286e-12),
    (7.98077179859056088018000647679, 5.72673038908716320361312585865e-15),
];

pub(crate) const GK35: [(f64, f64); 18] = [
    (0.0, 0.00051489450806878429379728416791),
    (0.248992297579960611806557803952, 0.191760115888044429590916239186),
    (0.741095349994540841861796561107, 0.148070831155216006153705613303),
    (1.23042363402730600775114365003, 0.0923647267169863059276383613338),
    (1.73205080756887729352744634151, 0.0452736854651505158647378658023),
    (2.23362606167694165200959431338, 0.0156734737518511515415579576573),
    (2.59608311504920215935784602955, 0.00315544626918756380509627832516),
    (2.86127957605705811733147448659, 0.00231134524035221012072341995794),
    (3.20533379449919451871837817631, 0.00081895392750226490906167715783),
    (3.63531851903727824521897202862, 0.000275242141167851574995163819725),
    (4.18495601767273186068890789532, 0.0000357293481989751002281842012478),
    (4.73643308595229708409872019687, 0.00000273422068011878298167069087658),
    (5.18701603991365606599177652182, 0.000000246764213457980786711604323833),
    (5.69817776848810958932964960213, 0.0000000213941944795611063066738760596),
    (6.36339449433636998763257860506, 4.60117603486561870108264094313e-10),
    (7.12210670080461665821897691566, 3.09722235760631617127944641702e-12),
    (7.98077179859056088018000647679, 5.45004126506368991707589692041e-15),
    (9.01693978989030251745980372131, 1.05413265823333411894004579401e-18),
];

/// Point counts of the tabulated rules, ascending.
pub(crate) const RULE_SIZES: [usize; 9] = [1, 3, 7, 9, 17, 19, 31, 33, 35];

/// Polynomial exactness degree of each rule, aligned with [`RULE_SIZES`].
pub(crate) const RULE_DEGREES: [usize; 9] = [1, 5, 7, 15, 17, 29, 31, 33, 51];

/// Rule size used at accuracy level `a` (index `a - 1`): the smallest
/// tabulated rule whose degree reaches `2a - 1`, the classical delayed
/// sequence that postpones switching to a bigger nested rule until its
/// extra degree is actually needed.
pub(crate) const LEVEL_RULE_SIZE: [usize; 25] = [
    1, 3, 3, 7, 9, 9, 9, 9, 17, 19, 19, 19, 19, 19, 19, 31, 33, 35, 35, 35, 35, 35, 35, 35, 35,
];

/// Positive half of the rule with `size` points.
pub(crate) fn half_table(size: usize) -> &'static [(f64, f64)] {
    match size {
        1 => &GK01,
        3 => &GK03,
        7 => &GK07,
        9 => &GK09,
        17 => &GK17,
        19 => &GK19,
        31 => &GK31,
        33 => &GK33,
        35 => &GK35,
        _ => unreachable!("no tabulated rule with {size} points"),
    }
}

/// Master magnitude list: the largest rule's half nodes, which contain
/// every node of every smaller rule verbatim.
pub(crate) fn master_half() -> &'static [(f64, f64)] {
    &GK35
}
