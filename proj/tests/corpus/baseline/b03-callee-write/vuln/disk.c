static int check_count(struct disk *d)
{
    if (d->count < 0)
        return 0;
    return 1;
}

int load_disk(struct disk *d, char *bh)
{
    if (!check_count(d)) {
        return -1;
    }
    d->slots[d->count] = bh;
    return 0;
}
