#include "addrtoname.h"

static u_int extract_header_length(uint16_t fc)
{
    return fc & 7;
}

u_int ieee802_15_4_if_print(netdissect_options *ndo, const u_char *p, u_int caplen)
{
    u_int hdrlen;
    uint16_t fc;
    const char *addr;
    fc = p[0];
    hdrlen = extract_header_length(fc);
    if (caplen < hdrlen + 8) {
        return caplen;
    }
    addr = le64addr_string(ndo, p + hdrlen);
    nd_print(ndo, addr);
    return hdrlen + 8;
}
