struct bsnamemem {
    struct bsnamemem *bs_nxt;
    unsigned int bs_nlen;
    char *bs_bytes;
    char *bs_name;
};

const char *le64addr_string(netdissect_options *ndo, const u_char *ep);
