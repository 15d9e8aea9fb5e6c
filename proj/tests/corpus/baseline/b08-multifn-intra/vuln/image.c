static int parse_width(struct image *im, int w)
{
    int row;
    row = w * im->bpp;
    return row;
}

static int parse_height(struct image *im, int h)
{
    im->rows = h;
    return h;
}
