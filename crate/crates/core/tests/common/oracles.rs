//! Values generated by tools/oracles.py (mpmath, 40 digits).
#![allow(dead_code)]

pub const GAMMA_QUARTER: f64 = 3.6256099082219083119;
pub const GAMMA_THIRTY: f64 = 8.8417619937397019545e+30;
pub const GAMMA_0_05: f64 = 19.470085311255512864;
pub const GAMMA_NEG_2_5: f64 = -0.94530872048294188123;
pub const J_3_4_AT_7_3: f64 = 0.17787435314696110632;
pub const J_NEG_1_3_AT_2: f64 = -0.075749980285132322903;
pub const J_3_4_AT_1E3: f64 = 0.013848328654564228696;
pub const J_NEG_3_4_AT_1E4: f64 = -0.0060855707751311925094;
pub const J_0_2_AT_20: f64 = 0.17820330084483841734;
pub const I_SCALED_NEG_3_4_AT_50: f64 = 0.056241132439871836594;
pub const I_SCALED_0_6_AT_3: f64 = 0.22445226352918138584;
pub const I_SCALED_NEG_0_9_AT_0_01: f64 = 12.256089919613959057;
pub const I_SCALED_0_75_AT_1E6: f64 = 0.00039894221806667506773;
pub const E2_AT_1_RE: f64 = 0.75619240703588265372;
pub const E2_AT_1_IM: f64 = 0.47570037710899577311;
pub const E1_AT_2_RE: f64 = -0.88342788324531431197;
pub const E1_AT_2_IM: f64 = 1.5053382281109545553;
pub const E3_AT_NEG_1_4_RE: f64 = 0.017679711985980518523;
pub const E3_AT_NEG_1_4_IM: f64 = -1.276033153111621129;
pub const E05_AT_30_RE: f64 = 1.7039231387008098622;
pub const E05_AT_30_IM: f64 = -0.89279290572734810387;
pub const N_NU_2: f64 = 3.048762374932151685;
pub const PHI_2_1_0_0: f64 = 0.3280019486668764664;
pub const PHI_1_05_1_NEG1: f64 = 0.089141413115138143452;
pub const PHI_2_1_07_12: f64 = 0.27878635689550750434;
pub const PHI_3_02_NEG05_NEG08: f64 = 0.40741110481181066533;
pub const PHI_05_2_3_NEG2: f64 = 0.0005642636546566019654;
pub const PHI_1_001_2_2: f64 = 5.6403511657196559964;
pub const KS_TAIL_0_6: f64 = 0.86428277905060430481;
pub const KS_TAIL_1: f64 = 0.2699996716773545212;
pub const KS_TAIL_1_8: f64 = 0.0030676213475797073254;
pub const U_NU_1: f64 = 1.2878993168540690872;
pub const U_NU_0_5: f64 = 1.2800554260265618209;
