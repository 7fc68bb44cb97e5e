//! ISO 3166-1 alpha-3 country codes and normalization of raw affiliation
//! country strings.
//!
//! The bundled table maps alpha-2 codes and common English country-name
//! variants to alpha-3. Raw strings that cannot be resolved normalize to
//! [`Normalized::Unknown`]; unknown is a value, not an error.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// An ISO 3166-1 alpha-3 country code, always three uppercase ASCII letters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alpha3([u8; 3]);

impl Alpha3 {
    pub fn as_str(&self) -> &str {
        // constructed only from validated ASCII uppercase
        std::str::from_utf8(&self.0).unwrap()
    }

    fn from_upper(s: &str) -> Option<Alpha3> {
        let b = s.as_bytes();
        if b.len() == 3 && b.iter().all(|c| c.is_ascii_uppercase()) {
            Some(Alpha3([b[0], b[1], b[2]]))
        } else {
            None
        }
    }
}

impl Default for Alpha3 {
    /// The ISO user-assigned placeholder code.
    fn default() -> Self {
        Alpha3(*b"XXX")
    }
}

impl fmt::Display for Alpha3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Alpha3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("not an alpha-3 code: {0:?}")]
pub struct ParseAlpha3Error(String);

impl FromStr for Alpha3 {
    type Err = ParseAlpha3Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Alpha3::from_upper(&upper).ok_or_else(|| ParseAlpha3Error(s.to_string()))
    }
}

impl Serialize for Alpha3 {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Alpha3 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Result of normalizing a raw country string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    Code(Alpha3),
    Unknown,
}

/// Lookup table from alpha-2 codes and name variants to alpha-3 codes.
pub struct CountryTable {
    by_alpha3: HashMap<[u8; 3], Alpha3>,
    by_alpha2: HashMap<[u8; 2], Alpha3>,
    by_name: HashMap<String, Alpha3>,
}

// alpha2|alpha3|canonical name, one entry per line
const ISO_TABLE: &str = "\
AF|AFG|Afghanistan
AX|ALA|Aland Islands
AL|ALB|Albania
DZ|DZA|Algeria
AS|ASM|American Samoa
AD|AND|Andorra
AO|AGO|Angola
AI|AIA|Anguilla
AQ|ATA|Antarctica
AG|ATG|Antigua and Barbuda
AR|ARG|Argentina
AM|ARM|Armenia
AW|ABW|Aruba
AU|AUS|Australia
AT|AUT|Austria
AZ|AZE|Azerbaijan
BS|BHS|Bahamas
BH|BHR|Bahrain
BD|BGD|Bangladesh
BB|BRB|Barbados
BY|BLR|Belarus
BE|BEL|Belgium
BZ|BLZ|Belize
BJ|BEN|Benin
BM|BMU|Bermuda
BT|BTN|Bhutan
BO|BOL|Bolivia
BQ|BES|Bonaire
BA|BIH|Bosnia and Herzegovina
BW|BWA|Botswana
BV|BVT|Bouvet Island
BR|BRA|Brazil
IO|IOT|British Indian Ocean Territory
BN|BRN|Brunei Darussalam
BG|BGR|Bulgaria
BF|BFA|Burkina Faso
BI|BDI|Burundi
CV|CPV|Cabo Verde
KH|KHM|Cambodia
CM|CMR|Cameroon
CA|CAN|Canada
KY|CYM|Cayman Islands
CF|CAF|Central African Republic
TD|TCD|Chad
CL|CHL|Chile
CN|CHN|China
CX|CXR|Christmas Island
CC|CCK|Cocos Islands
CO|COL|Colombia
KM|COM|Comoros
CD|COD|Democratic Republic of the Congo
CG|COG|Congo
CK|COK|Cook Islands
CR|CRI|Costa Rica
CI|CIV|Cote d'Ivoire
HR|HRV|Croatia
CU|CUB|Cuba
CW|CUW|Curacao
CY|CYP|Cyprus
CZ|CZE|Czechia
DK|DNK|Denmark
DJ|DJI|Djibouti
DM|DMA|Dominica
DO|DOM|Dominican Republic
EC|ECU|Ecuador
EG|EGY|Egypt
SV|SLV|El Salvador
GQ|GNQ|Equatorial Guinea
ER|ERI|Eritrea
EE|EST|Estonia
SZ|SWZ|Eswatini
ET|ETH|Ethiopia
FK|FLK|Falkland Islands
FO|FRO|Faroe Islands
FJ|FJI|Fiji
FI|FIN|Finland
FR|FRA|France
GF|GUF|French Guiana
PF|PYF|French Polynesia
TF|ATF|French Southern Territories
GA|GAB|Gabon
GM|GMB|Gambia
GE|GEO|Georgia
DE|DEU|Germany
GH|GHA|Ghana
GI|GIB|Gibraltar
GR|GRC|Greece
GL|GRL|Greenland
GD|GRD|Grenada
GP|GLP|Guadeloupe
GU|GUM|Guam
GT|GTM|Guatemala
GG|GGY|Guernsey
GN|GIN|Guinea
GW|GNB|Guinea-Bissau
GY|GUY|Guyana
HT|HTI|Haiti
HM|HMD|Heard Island and McDonald Islands
VA|VAT|Holy See
HN|HND|Honduras
HK|HKG|Hong Kong
HU|HUN|Hungary
IS|ISL|Iceland
IN|IND|India
ID|IDN|Indonesia
IR|IRN|Iran
IQ|IRQ|Iraq
IE|IRL|Ireland
IM|IMN|Isle of Man
IL|ISR|Israel
IT|ITA|Italy
JM|JAM|Jamaica
JP|JPN|Japan
JE|JEY|Jersey
JO|JOR|Jordan
KZ|KAZ|Kazakhstan
KE|KEN|Kenya
KI|KIR|Kiribati
KP|PRK|North Korea
KR|KOR|South Korea
KW|KWT|Kuwait
KG|KGZ|Kyrgyzstan
LA|LAO|Laos
LV|LVA|Latvia
LB|LBN|Lebanon
LS|LSO|Lesotho
LR|LBR|Liberia
LY|LBY|Libya
LI|LIE|Liechtenstein
LT|LTU|Lithuania
LU|LUX|Luxembourg
MO|MAC|Macao
MG|MDG|Madagascar
MW|MWI|Malawi
MY|MYS|Malaysia
MV|MDV|Maldives
ML|MLI|Mali
MT|MLT|Malta
MH|MHL|Marshall Islands
MQ|MTQ|Martinique
MR|MRT|Mauritania
MU|MUS|Mauritius
YT|MYT|Mayotte
MX|MEX|Mexico
FM|FSM|Micronesia
MD|MDA|Moldova
MC|MCO|Monaco
MN|MNG|Mongolia
ME|MNE|Montenegro
MS|MSR|Montserrat
MA|MAR|Morocco
MZ|MOZ|Mozambique
MM|MMR|Myanmar
NA|NAM|Namibia
NR|NRU|Nauru
NP|NPL|Nepal
NL|NLD|Netherlands
NC|NCL|New Caledonia
NZ|NZL|New Zealand
NI|NIC|Nicaragua
NE|NER|Niger
NG|NGA|Nigeria
NU|NIU|Niue
NF|NFK|Norfolk Island
MK|MKD|North Macedonia
MP|MNP|Northern Mariana Islands
NO|NOR|Norway
OM|OMN|Oman
PK|PAK|Pakistan
PW|PLW|Palau
PS|PSE|Palestine
PA|PAN|Panama
PG|PNG|Papua New Guinea
PY|PRY|Paraguay
PE|PER|Peru
PH|PHL|Philippines
PN|PCN|Pitcairn
PL|POL|Poland
PT|PRT|Portugal
PR|PRI|Puerto Rico
QA|QAT|Qatar
RE|REU|Reunion
RO|ROU|Romania
RU|RUS|Russia
RW|RWA|Rwanda
BL|BLM|Saint Barthelemy
SH|SHN|Saint Helena
KN|KNA|Saint Kitts and Nevis
LC|LCA|Saint Lucia
MF|MAF|Saint Martin
PM|SPM|Saint Pierre and Miquelon
VC|VCT|Saint Vincent and the Grenadines
WS|WSM|Samoa
SM|SMR|San Marino
ST|STP|Sao Tome and Principe
SA|SAU|Saudi Arabia
SN|SEN|Senegal
RS|SRB|Serbia
SC|SYC|Seychelles
SL|SLE|Sierra Leone
SG|SGP|Singapore
SX|SXM|Sint Maarten
SK|SVK|Slovakia
SI|SVN|Slovenia
SB|SLB|Solomon Islands
SO|SOM|Somalia
ZA|ZAF|South Africa
GS|SGS|South Georgia and the South Sandwich Islands
SS|SSD|South Sudan
ES|ESP|Spain
LK|LKA|Sri Lanka
SD|SDN|Sudan
SR|SUR|Suriname
SJ|SJM|Svalbard and Jan Mayen
SE|SWE|Sweden
CH|CHE|Switzerland
SY|SYR|Syria
TW|TWN|Taiwan
TJ|TJK|Tajikistan
TZ|TZA|Tanzania
TH|THA|Thailand
TL|TLS|Timor-Leste
TG|TGO|Togo
TK|TKL|Tokelau
TO|TON|Tonga
TT|TTO|Trinidad and Tobago
TN|TUN|Tunisia
TR|TUR|Turkey
TM|TKM|Turkmenistan
TC|TCA|Turks and Caicos Islands
TV|TUV|Tuvalu
UG|UGA|Uganda
UA|UKR|Ukraine
AE|ARE|United Arab Emirates
GB|GBR|United Kingdom
US|USA|United States
UM|UMI|United States Minor Outlying Islands
UY|URY|Uruguay
UZ|UZB|Uzbekistan
VU|VUT|Vanuatu
VE|VEN|Venezuela
VN|VNM|Vietnam
VG|VGB|British Virgin Islands
VI|VIR|U.S. Virgin Islands
WF|WLF|Wallis and Futuna
EH|ESH|Western Sahara
YE|YEM|Yemen
ZM|ZMB|Zambia
ZW|ZWE|Zimbabwe
";

// variant name|alpha3, merged on top of the canonical names
const NAME_VARIANTS: &str = "\
united states of america|USA
u.s.a.|USA
u.s.|USA
holland|NLD
the netherlands|NLD
england|GBR
scotland|GBR
wales|GBR
northern ireland|GBR
great britain|GBR
uk|GBR
czech republic|CZE
republic of korea|KOR
korea, republic of|KOR
korea|KOR
viet nam|VNM
russian federation|RUS
ivory coast|CIV
swaziland|SWZ
burma|MMR
macedonia|MKD
macau|MAC
east timor|TLS
vatican|VAT
vatican city|VAT
peoples r china|CHN
people's republic of china|CHN
republic of china|TWN
brunei|BRN
cape verde|CPV
turkiye|TUR
bolivia, plurinational state of|BOL
venezuela, bolivarian republic of|VEN
iran, islamic republic of|IRN
tanzania, united republic of|TZA
moldova, republic of|MDA
syrian arab republic|SYR
lao people's democratic republic|LAO
";

fn name_key(raw: &str) -> String {
    let lower = raw.trim().to_lowercase();
    lower.strip_prefix("the ").unwrap_or(&lower).to_string()
}

impl CountryTable {
    /// The built-in ISO 3166-1 table.
    pub fn bundled() -> &'static CountryTable {
        static TABLE: OnceLock<CountryTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let mut t = CountryTable::parse(ISO_TABLE).expect("bundled table is well-formed");
            for line in NAME_VARIANTS.lines() {
                let (name, code) = line.split_once('|').expect("variant line");
                let code: Alpha3 = code.parse().expect("variant alpha-3");
                t.by_name.insert(name_key(name), code);
            }
            t
        })
    }

    /// Parse a table from `alpha2|alpha3|name` lines. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str) -> anyhow::Result<CountryTable> {
        let mut table = CountryTable {
            by_alpha3: HashMap::new(),
            by_alpha2: HashMap::new(),
            by_name: HashMap::new(),
        };
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, '|');
            let (a2, a3, name) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => anyhow::bail!("country table line {}: expected alpha2|alpha3|name", i + 1),
            };
            let code: Alpha3 = a3
                .parse()
                .map_err(|e| anyhow::anyhow!("country table line {}: {}", i + 1, e))?;
            table.by_alpha3.insert(code.0, code);
            let a2b = a2.as_bytes();
            anyhow::ensure!(a2b.len() == 2, "country table line {}: bad alpha-2", i + 1);
            table.by_alpha2.insert([a2b[0], a2b[1]], code);
            table.by_name.insert(name_key(name), code);
        }
        Ok(table)
    }

    /// Normalize a raw country string to an alpha-3 code, or Unknown.
    pub fn normalize(&self, raw: &str) -> Normalized {
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            return Normalized::Unknown;
        }
        let upper = trimmed.to_ascii_uppercase();
        if upper.len() == 3 {
            if let Some(code) = Alpha3::from_upper(&upper) {
                if self.by_alpha3.contains_key(&code.0) {
                    return Normalized::Code(code);
                }
            }
        }
        if upper.len() == 2 {
            let b = upper.as_bytes();
            if let Some(code) = self.by_alpha2.get(&[b[0], b[1]]) {
                return Normalized::Code(*code);
            }
        }
        match self.by_name.get(&name_key(trimmed)) {
            Some(code) => Normalized::Code(*code),
            None => Normalized::Unknown,
        }
    }

    pub fn is_valid(&self, code: Alpha3) -> bool {
        self.by_alpha3.contains_key(&code.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve_to_alpha3() {
        let t = CountryTable::bundled();
        assert_eq!(t.normalize("Netherlands"), Normalized::Code("NLD".parse().unwrap()));
        assert_eq!(t.normalize("The Netherlands"), Normalized::Code("NLD".parse().unwrap()));
        assert_eq!(t.normalize("South Africa"), Normalized::Code("ZAF".parse().unwrap()));
    }

    #[test]
    fn alpha3_is_identity() {
        let t = CountryTable::bundled();
        assert_eq!(t.normalize("ZAF"), Normalized::Code("ZAF".parse().unwrap()));
        assert_eq!(t.normalize("esp"), Normalized::Code("ESP".parse().unwrap()));
    }

    #[test]
    fn alpha2_maps_to_alpha3() {
        let t = CountryTable::bundled();
        assert_eq!(t.normalize("GB"), Normalized::Code("GBR".parse().unwrap()));
        assert_eq!(t.normalize("us"), Normalized::Code("USA".parse().unwrap()));
    }

    #[test]
    fn unmapped_is_unknown() {
        let t = CountryTable::bundled();
        assert_eq!(t.normalize("Atlantis"), Normalized::Unknown);
        assert_eq!(t.normalize("XQZ"), Normalized::Unknown);
        assert_eq!(t.normalize(""), Normalized::Unknown);
    }

    #[test]
    fn normalize_is_idempotent() {
        let t = CountryTable::bundled();
        for raw in ["Spain", "NL", "CAN", "United States of America"] {
            if let Normalized::Code(code) = t.normalize(raw) {
                assert_eq!(t.normalize(code.as_str()), Normalized::Code(code));
            } else {
                panic!("{raw} should map");
            }
        }
    }
}
