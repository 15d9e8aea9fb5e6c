static int table_lookup(const int *table, int idx)
{
    int v;
    v = table[idx];
    return v;
}
