/* discrete wavelet transform support */
typedef struct DWTContext {
    int ndeclevels;
    int linelen[32];
    int mod;
} DWTContext;

static void line_update(int *t, int len)
{
    t[0] = len;
}

/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
/* reserved */
static void dwt_decode53(DWTContext *s, int *t)
{
    int lev;
    int len;
    len = s->linelen[s->ndeclevels - 1];
    for (lev = 0; lev < s->ndeclevels; lev++) {
        line_update(t, len);
    }
}

int ff_dwt_decode(DWTContext *s, int *t)
{
    if (!s)
        return 1;
    if (s->ndeclevels == 0) {
        return 0;
    }
    dwt_decode53(s, t);
    return 0;
}
