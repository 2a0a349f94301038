#pragma once

#include <gmpxx.h>

#include <string_view>
#include <vector>

#include "primechain/rational.hpp"

// Reference constants and published sequence values backing the built-in
// verification targets. Digit strings are embedded verbatim from the source
// of record; none are recomputed or "corrected" here.

namespace primechain::constants {

/// Mills-style constant for floor(A^(3^n)): 28 published digits.
inline constexpr std::string_view kMillsA = "1.3063778838630806904686144926";

/// The first five Mills primes (the printed digits of A decide four of them;
/// the fifth pins the forward regeneration).
inline const std::vector<mpz_class>& mills_known_primes() {
  static const std::vector<mpz_class> v = {
      mpz_class("2"), mpz_class("11"), mpz_class("1361"), mpz_class("2521008887"),
      mpz_class("16022236204009818131831320183")};
  return v;
}

/// Wright tower constant for floor(2^2^...^2^alpha): 8 published digits.
inline constexpr std::string_view kWrightAlpha = "1.9287800";

/// Tower primes reachable at desk scale; the fourth is a 4932-digit search.
inline const std::vector<mpz_class>& wright_known_primes() {
  static const std::vector<mpz_class> v = {mpz_class(3), mpz_class(13), mpz_class(16381)};
  return v;
}

/// Seed for the exponent-5/4 nearest-rounding chain, 2699 digits as printed.
/// The printed digits sustain 25 consecutive prime terms; past that the
/// rounded values go composite, which is reported rather than papered over.
inline constexpr std::string_view kSeed54 =
    "43.804687715802934818596645625690894950810370871374951840740613287526704195060936649633371078164"
    "457395679435580757466539300146364247357107906520722332196992293264945523871320676837539601640703"
    "027906901627234335816037601910027530786667742469946232497117701938607432869957196648511059166975"
    "420773341676861028138823707614570899164729107672100535367647148156830215153488887824134630021965"
    "908989121537807818768276618328571083354683602327177557419282082356357338008605137724420625635595"
    "950708768409691378766548276776271408551872012425050013678129199364572781681348489670886436487861"
    "801073801226232634055126530099559493255624932776432552081947461043595401895256995602780478881043"
    "842718086759335099554836551105709755350785549077202528823776864085546060978256419523714505379764"
    "311017583547117340087411947508130804223989560771735318948100069661049983567447403715688569612514"
    "858184565761795317404695538999590174776843940538456721389112127984878201452915510467629440955925"
    "010855475725385626417446232721714485692213455756668913904742940022850913797454553749686615314701"
    "489947123703486927933780200879792730832786803750388877347341101325998962430066686936348443271039"
    "811956815726425758834972052461077249503005611993311614482718587460518670384095172358532168924929"
    "832717916742877592808379854507150680319033191053916646608417677828927515630775969847441245544942"
    "358402605136857275764271827756643203702675828307128399035685631769956462627461416682265277556094"
    "918638843788662398254929224611054007569004788919208610982286819905683224721442158661002137912306"
    "130798847105167149728311015686742896068018055039666261455214656709133892570495508578125761712020"
    "239574873573397884937126769426225000014887911004760565168355053802557466312278070529726060791106"
    "644597456766180349330513035089116848652537022141697254064935243516349196181106691168487082945757"
    "295213969686709256091709648273831509688200073466164620087546671259121629887393234505470764134731"
    "474624437303908697918037642878970154570903124414003971035727236780869036666409143377213276642966"
    "534966635531648174167527244529903914822868937719499045856202654837054080902656404754480085485690"
    "226964192785370152739052515666046613248284007441714998112109106552831729128554638499405603790836"
    "674405586467283254508314622550771124665670893874389752184393456176782493932252715194466564063773"
    "853434229863045864802519801327748298468948863029347275123208556667311057826570702055978747565264"
    "786935758838660918835790956716726895968781893980619757708983553342825007007646386167273823668982"
    "442934126614300824963048052924951422447213547431231049639749361462933644408676561745138817618112"
    "161958613554097226590982832455160532348892270853032526217953271203753936241844699444780852653926"
    "712756105661";

/// Published values of the 5/4 chain (the printed list skips two early terms;
/// membership, not position, is what verification checks).
inline const std::vector<mpz_class>& chain54_published() {
  static const std::vector<mpz_class> v = {
      mpz_class(113),        mpz_class(367),      mpz_class(102217),
      mpz_class(1827697),    mpz_class(67201679), mpz_class("6084503671")};
  return v;
}

/// Seed for the exponent-3/2 nearest-rounding chain, 54 published digits.
inline constexpr std::string_view kSeed32 =
    "2.03823915478206876746349086260954825144862477844317361";

/// Published 3/2 chain. The printed seed digits decide the first 13 terms;
/// the 14th needs more digits than were published.
inline const std::vector<mpz_class>& chain32_published() {
  static const std::vector<mpz_class> v = {
      mpz_class(2),
      mpz_class(3),
      mpz_class(5),
      mpz_class(11),
      mpz_class(37),
      mpz_class(223),
      mpz_class(3331),
      mpz_class(192271),
      mpz_class(84308429),
      mpz_class("774116799347"),
      mpz_class("681098209317971743"),
      mpz_class("562101323304225290104514179"),
      mpz_class("13326678220145859782825116625722145759009"),
      mpz_class("1538448162271607869601834587431948506238982765193425993274489")};
  return v;
}

/// Scale constant for floor(c * n^n), 40 published digits.
inline constexpr std::string_view kScaleNN = "0.2655883729431433908971294536654661294389";

/// The 19 published primes floor(c * n^n) for n = 3..21; n = 22 is composite.
inline const std::vector<mpz_class>& scaled_nn_published() {
  static const std::vector<mpz_class> v = {
      mpz_class(7),
      mpz_class(67),
      mpz_class(829),
      mpz_class(12391),
      mpz_class(218723),
      mpz_class(4455833),
      mpz_class(102894377),
      mpz_class("2655883729"),
      mpz_class("75775462379"),
      mpz_class("2368012611049"),
      mpz_class("80440106764817"),
      mpz_class("2951219812933057"),
      mpz_class("116299525867995629"),
      mpz_class("4899240744635092571"),
      mpz_class("219705395187452015923"),
      mpz_class("10449948501874965563651"),
      mpz_class("525445257345556693801913"),
      mpz_class("27848959374722952425334841"),
      mpz_class("1551723179991864497606172809")};
  return v;
}

inline constexpr unsigned long kScaledNNStart = 3;
inline constexpr unsigned long kScaledNNEnd = 21;

/// Seed for the base-10 digit-shift chain.
inline constexpr std::string_view kSeedShift10 = "7.3327334517988679";

/// Published digit-shift primes (indices 1..5 of the orbit).
inline const std::vector<mpz_class>& shift10_published() {
  static const std::vector<mpz_class> v = {mpz_class(73), mpz_class(733), mpz_class(7333),
                                            mpz_class(73327), mpz_class(733273)};
  return v;
}

/// Record claim: an 807-digit probable prime published as the 50th term of a
/// 101/100 next-above chain started at 10^500 + 961.
inline constexpr std::string_view kRecordTerm =
    "129729528971426122166658259081315435974871367309456840812055525509563976052536464197821936120784"
    "492089449745630948278142648656401758919926499683620493424145145363861773044716845814540511418289"
    "754542689191694327904116242782241131052138054549585683795895226460529926493834263717492409387560"
    "259409231253958370245042303023794648019244182073576593618946511947995963350548413770285593359081"
    "097306798650486731513585054871329096194202981055877907668708729761964242992640744211230936407662"
    "435884639367683685800000716124853576007781499789743771269181463159253173337794440878414346193538"
    "514506034277502087533266305538298562224619861085522581430515597209416207494298867400378422593043"
    "260350351208262898632520628116793338057678207643439460644660886621181985756002255888259043523402"
    "372168932260997906477619348535003398763";

inline const mpz_class& record_chain_start() {
  static const mpz_class v = [] {
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), 10, 500);
    return mpz_class(t + 961);
  }();
  return v;
}

inline const RationalExponent& record_chain_exponent() {
  static const RationalExponent e(101, 100);
  return e;
}

inline constexpr unsigned long kRecordClaimedIndex = 50;

}  // namespace primechain::constants
