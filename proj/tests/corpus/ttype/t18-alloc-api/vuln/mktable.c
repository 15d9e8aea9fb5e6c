static char *make_table(int rows, int cols)
{
    char *table;
    int stride;
    stride = rows;
    table = malloc(stride * cols);
    return table;
}
